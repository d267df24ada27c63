#pragma once
// Independent oracles used only by tests. Everything here recomputes results
// from first principles with deliberately different code paths than the
// library: flows by fixed-point sweeps instead of chain walks, costs by
// direct summation over raw definitions, and optima by naive enumeration of
// every assignment with validity checked on complete tables only.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "netopt/evaluate.hpp"
#include "netopt/flow.hpp"
#include "netopt/model.hpp"
#include "netopt/rng.hpp"
#include "netopt/solve.hpp"
#include "netopt/validate.hpp"

namespace netopt::oracle {

// Jacobi sweeps of the flow recursion f(i,j) = N(i,j) + sum of f(s,j) over
// pairs routed through i. Converges within one sweep per chain level; bails
// out (nullopt) if still moving after node-count sweeps, i.e. on a cycle.
inline std::optional<std::map<NodePair, double>> fixpoint_flows(const Instance& inst,
                                                                const RoutingTable& rt) {
  std::set<NodePair> domain;
  std::map<NodePair, double> demand_at;
  for (const Demand& d : inst.demands) {
    domain.insert({d.origin, d.dest});
    demand_at[{d.origin, d.dest}] += d.volume;
  }
  for (const auto& [pair, hop] : rt.next_hop)
    if (hop != pair.second) domain.insert({hop, pair.second});

  std::map<NodePair, double> flows;
  for (const NodePair& p : domain) flows[p] = 0.0;
  for (std::size_t sweep = 0; sweep <= inst.nodes.size() + 1; ++sweep) {
    std::map<NodePair, double> next;
    for (const NodePair& p : domain) {
      double f = 0.0;
      auto dit = demand_at.find(p);
      if (dit != demand_at.end()) f += dit->second;
      for (const auto& [pair, hop] : rt.next_hop)
        if (pair.second == p.second && hop == p.first && hop != pair.second) {
          auto fit = flows.find(pair);
          if (fit != flows.end()) f += fit->second;
        }
      next[p] = f;
    }
    if (next == flows) return flows;
    flows = std::move(next);
  }
  return std::nullopt;
}

struct RawCosts {
  double accumulation = 0.0;
  double transport = 0.0;
  double transfer_time = 0.0;
  double transfer_op = 0.0;
  bool capacity_ok = true;
  bool deadline_ok = true;
  std::map<NodePair, double> service;
  std::map<NodeId, double> sort_load;

  double objective() const { return accumulation + transport + transfer_time + transfer_op; }
  bool feasible() const { return capacity_ok && deadline_ok; }
};

// Recomputes the full cost decomposition and constraint outcome from raw
// definitions. Returns nullopt for cyclic routings.
inline std::optional<RawCosts> raw_costs(const Instance& inst, const RoutingTable& rt) {
  auto flows_opt = fixpoint_flows(inst, rt);
  if (!flows_opt) return std::nullopt;
  const std::map<NodePair, double>& flows = *flows_opt;

  RawCosts out;
  for (const auto& [pair, f] : flows) {
    auto hop = rt.next(pair.first, pair.second);
    if (!hop) {
      if (f > 0.0) return std::nullopt;  // incomplete routing
      continue;
    }
    if (f <= 0.0) continue;
    out.service[{pair.first, *hop}] += f;
    if (*hop != pair.second) out.sort_load[*hop] += f;
  }

  auto arc_of = [&inst](NodeId from, NodeId to) -> const ServiceArc* {
    for (const ServiceArc& a : inst.arcs)
      if (a.from == from && a.to == to) return &a;
    return nullptr;
  };

  for (const auto& [pair, f] : out.service) {
    const ServiceArc* arc = arc_of(pair.first, pair.second);
    if (!arc) return std::nullopt;
    out.accumulation += inst.time_value * inst.nodes[pair.first].accum_param * arc->carrier_size;
    out.transport += (f / arc->carrier_size) * arc->unit_trip_cost;
  }
  for (const auto& [node, load] : out.sort_load) {
    out.transfer_time += load * inst.time_value * inst.nodes[node].op_time;
    out.transfer_op += load * inst.nodes[node].op_cost;
    if (load > inst.nodes[node].transfer_capacity) out.capacity_ok = false;
  }

  for (const Demand& d : inst.demands) {
    if (!std::isfinite(d.deadline)) continue;
    double time = 0.0;
    NodeId cur = d.origin;
    std::vector<NodeId> chain{cur};
    while (cur != d.dest) {
      auto hop = rt.next(cur, d.dest);
      if (!hop) return std::nullopt;
      const ServiceArc* arc = arc_of(cur, *hop);
      if (!arc) return std::nullopt;
      time += arc->travel_time;
      if (*hop != d.dest) {
        auto sit = out.service.find({*hop, *rt.next(*hop, d.dest)});
        if (sit == out.service.end()) return std::nullopt;
        time += inst.nodes[*hop].op_time +
                inst.nodes[*hop].accum_param *
                    arc_of(*hop, *rt.next(*hop, d.dest))->carrier_size / sit->second;
      }
      cur = *hop;
      chain.push_back(cur);
      if (chain.size() > inst.nodes.size() + 1) return std::nullopt;
    }
    if (time > d.deadline) out.deadline_ok = false;
  }
  return out;
}

// Cost of serving a single demand alone along one chain, from the raw
// definitions: every chain arc is charged its fixed accumulation term plus
// volume/carrier_size dispatches; every intermediate node sorts the full
// volume.
inline double lone_chain_cost(const Instance& inst, const std::vector<NodeId>& chain,
                              double volume) {
  auto arc_of = [&inst](NodeId from, NodeId to) -> const ServiceArc* {
    for (const ServiceArc& a : inst.arcs)
      if (a.from == from && a.to == to) return &a;
    return nullptr;
  };
  double cost = 0.0;
  for (std::size_t m = 0; m + 1 < chain.size(); ++m) {
    const ServiceArc* arc = arc_of(chain[m], chain[m + 1]);
    cost += inst.time_value * inst.nodes[chain[m]].accum_param * arc->carrier_size;
    cost += (volume / arc->carrier_size) * arc->unit_trip_cost;
  }
  for (std::size_t m = 1; m + 1 < chain.size(); ++m)
    cost += volume * (inst.time_value * inst.nodes[chain[m]].op_time +
                      inst.nodes[chain[m]].op_cost);
  return cost;
}

// Delivery hours of that lone chain.
inline double lone_chain_time(const Instance& inst, const std::vector<NodeId>& chain,
                              double volume) {
  auto arc_of = [&inst](NodeId from, NodeId to) -> const ServiceArc* {
    for (const ServiceArc& a : inst.arcs)
      if (a.from == from && a.to == to) return &a;
    return nullptr;
  };
  double time = 0.0;
  for (std::size_t m = 0; m + 1 < chain.size(); ++m)
    time += arc_of(chain[m], chain[m + 1])->travel_time;
  for (std::size_t m = 1; m + 1 < chain.size(); ++m)
    time += inst.nodes[chain[m]].op_time +
            inst.nodes[chain[m]].accum_param * arc_of(chain[m], chain[m + 1])->carrier_size /
                volume;
  return time;
}

namespace detail {

inline void naive_rec(const Instance& inst, const InstanceIndex& idx,
                      std::set<NodePair>& pending, RoutingTable& table,
                      const std::function<void(const RoutingTable&)>& visit) {
  if (pending.empty()) {
    RoutingTable complete = table;
    for (const auto& [pair, hop] : table.next_hop) {
      if (hop == pair.second) continue;
      auto companion = complete.next(pair.first, hop);
      if (!companion)
        complete.set(pair.first, hop, hop);
      else if (*companion != hop)
        return;  // transfer chosen where a direct decision is required
    }
    if (validate_solution(inst, complete).empty()) visit(complete);
    return;
  }
  NodePair pair = *pending.begin();
  pending.erase(pending.begin());
  std::vector<NodeId> options;
  for (const ServiceArc& a : inst.arcs) {
    if (a.from != pair.first) continue;
    if (a.to == pair.second || is_candidate_transfer(inst, pair.first, pair.second, a.to))
      options.push_back(a.to);
  }
  std::sort(options.begin(), options.end());
  for (NodeId choice : options) {
    table.set(pair.first, pair.second, choice);
    bool queued = false;
    NodePair successor{choice, pair.second};
    if (choice != pair.second && !table.next(choice, pair.second) && !pending.count(successor)) {
      pending.insert(successor);
      queued = true;
    }
    naive_rec(inst, idx, pending, table, visit);
    if (queued) pending.erase(successor);
    table.next_hop.erase(pair);
  }
  pending.insert(pair);
}

}  // namespace detail

// Enumerates every structurally valid routing table by brute force and calls
// `visit` for each.
inline void naive_enumerate(const Instance& inst,
                            const std::function<void(const RoutingTable&)>& visit) {
  InstanceIndex idx(inst);
  std::set<NodePair> pending;
  for (const Demand& d : inst.demands) pending.insert({d.origin, d.dest});
  RoutingTable table;
  detail::naive_rec(inst, idx, pending, table, visit);
}

struct NaiveBest {
  bool found = false;
  double objective = 0.0;
  RoutingTable table;
  long long valid_tables = 0;
};

// Minimum-objective feasible table with the (objective, table) tie-break.
inline NaiveBest naive_best(const Instance& inst) {
  NaiveBest best;
  naive_enumerate(inst, [&](const RoutingTable& rt) {
    ++best.valid_tables;
    EvaluationReport report = evaluate(inst, rt);
    if (!report.feasible) return;
    if (!best.found || report.objective < best.objective ||
        (report.objective == best.objective && rt < best.table)) {
      best.found = true;
      best.objective = report.objective;
      best.table = rt;
    }
  });
  return best;
}

// Random structurally valid routing: a random admissible chain per demand,
// merged in demand order (a chain that meets an earlier chain toward the same
// destination follows it), then repaired into canonical form.
inline std::optional<RoutingTable> random_valid_table(const Instance& inst, Rng& rng,
                                                      int max_transfers = 4) {
  RoutingTable rt;
  for (const Demand& d : inst.demands) {
    std::vector<TransferChain> chains = enumerate_chains(inst, d, max_transfers);
    if (chains.empty()) return std::nullopt;
    const TransferChain& chain = chains[rng.below(static_cast<int>(chains.size()))];
    NodeId cur = d.origin;
    std::size_t at = 0;
    while (cur != d.dest) {
      if (auto next = rt.next(cur, d.dest)) {
        cur = *next;
        continue;
      }
      // While no earlier chain has been joined, cur tracks chain.nodes[at].
      rt.set(cur, d.dest, chain.nodes[at + 1]);
      cur = chain.nodes[at + 1];
      ++at;
    }
  }
  RoutingTable repaired = repair_consistency(inst, rt);
  if (!validate_solution(inst, repaired).empty()) return std::nullopt;
  return repaired;
}

}  // namespace netopt::oracle
