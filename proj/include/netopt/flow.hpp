#pragma once
// Flow engine: derives all solution-dependent quantities from a routing table.
// Given the daily demands and the next-hop decisions, computes node flows,
// arc service flows, carrier frequencies and sorting loads, extracts the
// transfer chain of each demand, and enumerates candidate chains.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "netopt/model.hpp"

namespace netopt {

struct FlowState {
  // f(i,j): units/day present at node i destined to j (original demand at i
  // plus flow sorted at i). Only positive entries are stored.
  std::map<NodePair, double> flow;
  // F(i,j): units/day moving on the service arc i->j. Defined on served arcs.
  std::map<NodePair, double> service_flow;
  // Carriers/day on each served arc: service_flow / carrier_size.
  std::map<NodePair, double> frequency;
  // R(k): units/day sorted at node k. Only positive entries are stored.
  std::map<NodeId, double> sort_load;

  double flow_at(NodeId i, NodeId j) const {
    auto it = flow.find({i, j});
    return it == flow.end() ? 0.0 : it->second;
  }
  double service_flow_at(NodeId i, NodeId j) const {
    auto it = service_flow.find({i, j});
    return it == service_flow.end() ? 0.0 : it->second;
  }
  double sort_load_at(NodeId k) const {
    auto it = sort_load.find(k);
    return it == sort_load.end() ? 0.0 : it->second;
  }

  bool operator==(const FlowState&) const = default;
};

// Ordered node sequence one demand follows, origin first, destination last.
struct TransferChain {
  NodeId origin = kInvalidNode;
  NodeId dest = kInvalidNode;
  std::vector<NodeId> nodes;

  bool direct() const { return nodes.size() == 2; }
  bool operator==(const TransferChain&) const = default;
};

struct CycleError : Error {
  NodeId dest;
  std::vector<NodeId> cycle;
  CycleError(NodeId dest_, std::vector<NodeId> cycle_)
      : Error(describe(dest_, cycle_)), dest(dest_), cycle(std::move(cycle_)) {}

  static std::string describe(NodeId dest, const std::vector<NodeId>& cycle) {
    std::ostringstream os;
    os << "routing toward destination " << dest << " cycles through [";
    for (std::size_t i = 0; i < cycle.size(); ++i) os << (i ? " " : "") << cycle[i];
    os << "]";
    return os.str();
  }
};

struct MissingDecisionError : Error {
  NodeId node;
  NodeId dest;
  MissingDecisionError(NodeId node_, NodeId dest_)
      : Error("no next hop defined at node " + std::to_string(node_) +
              " for flow destined to " + std::to_string(dest_)),
        node(node_),
        dest(dest_) {}
};

namespace detail {

// Dense buffers reused across repeated evaluations of one instance.
struct EvalScratch {
  std::vector<double> flow;       // per node, toward the current destination
  std::vector<double> service;    // per arc position
  std::vector<double> sort_load;  // per node
  std::vector<int> node_epoch;    // marks flow[] validity per destination
  std::vector<NodePair> support;  // pairs carrying positive flow, sorted
  std::vector<int> served_arcs;   // arc positions with service > 0, sorted
  std::vector<NodeId> sorted_nodes;  // nodes with sort_load > 0, sorted
  int epoch = 0;

  void prepare(const Instance& inst) {
    flow.assign(inst.nodes.size(), 0.0);
    service.assign(inst.arcs.size(), 0.0);
    sort_load.assign(inst.nodes.size(), 0.0);
    node_epoch.assign(inst.nodes.size(), -1);
    support.clear();
    served_arcs.clear();
    sorted_nodes.clear();
    epoch = 0;
  }
};

// Follows next hops from `start` toward `dest` and returns the node cycle
// found. Call only when a cycle is known to exist on that walk.
inline std::vector<NodeId> find_cycle(const RoutingTable& rt, NodeId start, NodeId dest,
                                      std::size_t node_count) {
  std::vector<NodeId> path;
  std::vector<char> on_path(node_count, 0);
  NodeId cur = start;
  while (cur != dest) {
    if (on_path[cur]) {
      auto it = std::find(path.begin(), path.end(), cur);
      return {it, path.end()};
    }
    on_path[cur] = 1;
    path.push_back(cur);
    auto next = rt.next(cur, dest);
    if (!next) break;
    cur = *next;
  }
  return path;  // not reached when the caller's precondition holds
}

// Core propagation. Walks every demand along its decided chain, accumulating
// node flows, arc service flows and sorting loads into the scratch buffers.
// Flow toward distinct destinations never mixes, so each walk simply adds the
// demand volume at every leg it traverses. Throws CycleError when a chain
// revisits a node and MissingDecisionError when a leg has no decision.
inline void run_flows(const InstanceIndex& idx, const RoutingTable& rt, EvalScratch& s,
                      FlowState* out) {
  const Instance& inst = idx.instance();
  if (s.node_epoch.size() != inst.nodes.size() || s.service.size() != inst.arcs.size())
    s.prepare(inst);
  std::fill(s.service.begin(), s.service.end(), 0.0);
  std::fill(s.sort_load.begin(), s.sort_load.end(), 0.0);
  s.support.clear();
  s.served_arcs.clear();
  s.sorted_nodes.clear();

  const std::size_t n = inst.nodes.size();
  for (const auto& [dest, origins] : idx.demands_by_dest()) {
    ++s.epoch;
    for (const auto& [origin, volume] : origins) {
      NodeId cur = origin;
      std::size_t steps = 0;
      while (cur != dest) {
        if (++steps > n) throw CycleError(dest, find_cycle(rt, origin, dest, n));
        auto next = rt.next(cur, dest);
        if (!next) throw MissingDecisionError(cur, dest);
        if (s.node_epoch[cur] != s.epoch) {
          s.node_epoch[cur] = s.epoch;
          s.flow[cur] = 0.0;
          s.support.push_back({cur, dest});
        }
        s.flow[cur] += volume;
        int pos = idx.arc_pos(cur, *next);
        if (pos < 0)
          throw Error("routing uses the missing service arc " + std::to_string(cur) + "->" +
                      std::to_string(*next));
        s.service[pos] += volume;
        if (*next != dest) s.sort_load[*next] += volume;
        cur = *next;
      }
    }
  }

  std::sort(s.support.begin(), s.support.end());
  for (int a = 0; a < static_cast<int>(inst.arcs.size()); ++a)
    if (s.service[a] > 0.0) s.served_arcs.push_back(a);
  for (NodeId k = 0; k < static_cast<NodeId>(n); ++k)
    if (s.sort_load[k] > 0.0) s.sorted_nodes.push_back(k);

  if (out) {
    out->flow.clear();
    out->service_flow.clear();
    out->frequency.clear();
    out->sort_load.clear();
    // Node flows were accumulated per destination; recover them by replaying
    // the walks over the already-verified table.
    std::map<NodePair, double> flows;
    for (const auto& [dest, origins] : idx.demands_by_dest()) {
      for (const auto& [origin, volume] : origins) {
        NodeId cur = origin;
        while (cur != dest) {
          flows[{cur, dest}] += volume;
          cur = *rt.next(cur, dest);
        }
      }
    }
    out->flow = std::move(flows);
    for (int a : s.served_arcs) {
      const ServiceArc& arc = inst.arcs[a];
      out->service_flow[{arc.from, arc.to}] = s.service[a];
      out->frequency[{arc.from, arc.to}] = s.service[a] / arc.carrier_size;
    }
    for (NodeId k : s.sorted_nodes) out->sort_load[k] = s.sort_load[k];
  }
}

// Fewest-hop path start -> dest where every step obeys the per-leg candidate
// rule and avoids `blocked` nodes. Deterministic; empty when unreachable.
inline std::vector<NodeId> bfs_path(const InstanceIndex& idx, NodeId start, NodeId dest,
                                    const std::vector<char>& blocked, int max_transfers) {
  const Instance& inst = idx.instance();
  std::vector<NodeId> parent(inst.nodes.size(), kInvalidNode);
  std::vector<int> depth(inst.nodes.size(), -1);
  std::vector<NodeId> queue{start};
  depth[start] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (const auto& [w, arc] : idx.out(u)) {
      if (w == dest) {
        std::vector<NodeId> path{dest, u};
        for (NodeId v = u; v != start; v = parent[v]) path.push_back(parent[v]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (depth[w] >= 0 || blocked[w]) continue;
      if (depth[u] + 1 > max_transfers) continue;
      if (!is_candidate_transfer(inst, u, dest, w)) continue;
      depth[w] = depth[u] + 1;
      parent[w] = u;
      queue.push_back(w);
    }
  }
  return {};
}

}  // namespace detail

// Computes every derived flow quantity for one (instance, routing) pair.
// Pure: the result depends only on the inputs.
inline FlowState propagate_flows(const Instance& inst, const RoutingTable& rt) {
  InstanceIndex idx(inst);
  detail::EvalScratch scratch;
  FlowState fs;
  detail::run_flows(idx, rt, scratch, &fs);
  return fs;
}

// Unrolls the next-hop recursion for one demand: [s, hop, hop, ..., t].
inline TransferChain extract_chain(const Instance& inst, const RoutingTable& rt,
                                   const Demand& demand) {
  TransferChain chain;
  chain.origin = demand.origin;
  chain.dest = demand.dest;
  chain.nodes.push_back(demand.origin);
  std::vector<char> seen(inst.nodes.size(), 0);
  NodeId cur = demand.origin;
  while (cur != demand.dest) {
    if (seen[cur])
      throw CycleError(demand.dest,
                       detail::find_cycle(rt, demand.origin, demand.dest, inst.nodes.size()));
    seen[cur] = 1;
    auto next = rt.next(cur, demand.dest);
    if (!next) throw MissingDecisionError(cur, demand.dest);
    cur = *next;
    chain.nodes.push_back(cur);
  }
  return chain;
}

namespace detail {

inline void enumerate_chains_rec(const InstanceIndex& idx, const Demand& demand,
                                 int max_transfers, std::vector<NodeId>& path,
                                 std::vector<char>& on_path,
                                 std::vector<TransferChain>& out) {
  const Instance& inst = idx.instance();
  NodeId cur = path.back();
  int transfers_used = static_cast<int>(path.size()) - 1;
  // Visit successors in ascending id order so chains come out in
  // lexicographic order of their node sequences.
  for (const auto& [to, arc] : idx.out(cur)) {
    if (to == demand.dest) {
      TransferChain chain;
      chain.origin = demand.origin;
      chain.dest = demand.dest;
      chain.nodes = path;
      chain.nodes.push_back(to);
      out.push_back(std::move(chain));
      continue;
    }
    if (transfers_used >= max_transfers) continue;
    if (on_path[to]) continue;
    if (!is_candidate_transfer(inst, demand.origin, demand.dest, to)) continue;
    on_path[to] = 1;
    path.push_back(to);
    enumerate_chains_rec(idx, demand, max_transfers, path, on_path, out);
    path.pop_back();
    on_path[to] = 0;
  }
}

}  // namespace detail

// All simple arc-paths from the demand's origin to its destination using at
// most `max_transfers` intermediate nodes, intermediates drawn from the
// demand's candidate transfer set. Deterministic lexicographic order; empty
// when the destination is unreachable.
inline std::vector<TransferChain> enumerate_chains(const Instance& inst, const Demand& demand,
                                                   int max_transfers = 4) {
  InstanceIndex idx(inst);
  std::vector<TransferChain> out;
  if (!inst.has_node(demand.origin) || !inst.has_node(demand.dest)) return out;
  std::vector<NodeId> path{demand.origin};
  std::vector<char> on_path(inst.nodes.size(), 0);
  on_path[demand.origin] = 1;
  detail::enumerate_chains_rec(idx, demand, max_transfers, path, on_path, out);
  return out;
}

// Rebuilds the table in canonical form: exactly the pairs that carry flow,
// plus the direct companion entry of every transfer decision. Requires a
// structurally complete, acyclic table.
inline RoutingTable canonical_routing(const InstanceIndex& idx, const RoutingTable& rt) {
  const Instance& inst = idx.instance();
  RoutingTable canon;
  const std::size_t n = inst.nodes.size();
  for (const auto& [dest, origins] : idx.demands_by_dest()) {
    for (const auto& [origin, volume] : origins) {
      NodeId cur = origin;
      std::size_t steps = 0;
      while (cur != dest) {
        if (++steps > n) throw CycleError(dest, detail::find_cycle(rt, origin, dest, n));
        auto next = rt.next(cur, dest);
        if (!next) throw MissingDecisionError(cur, dest);
        canon.set(cur, dest, *next);
        if (*next != dest) canon.set(cur, *next, *next);  // forced direct companion
        cur = *next;
      }
    }
  }
  return canon;
}

inline RoutingTable canonical_routing(const Instance& inst, const RoutingTable& rt) {
  InstanceIndex idx(inst);
  return canonical_routing(idx, rt);
}

}  // namespace netopt
