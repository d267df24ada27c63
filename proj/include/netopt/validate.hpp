#pragma once
// Structural validation of instances and routing tables. Violations are data,
// not exceptions, and come out in a deterministic order so repeated runs over
// unchanged input produce identical lists.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netopt/model.hpp"

namespace netopt {

inline bool has_errors(const std::vector<Violation>& violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::Error; });
}

namespace detail {

inline std::string pair_entity(const char* what, NodeId a, NodeId b) {
  std::ostringstream os;
  os << what << " " << a << "->" << b;
  return os.str();
}

inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace detail

inline std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&out](Rule rule, std::string entity, std::string message,
                    Severity sev = Severity::Error) {
    out.push_back({rule, sev, std::move(entity), std::move(message)});
  };

  for (std::size_t i = 0; i < inst.nodes.size(); ++i) {
    const Node& node = inst.nodes[i];
    std::string entity = "node " + std::to_string(i);
    if (node.id != static_cast<NodeId>(i))
      add(Rule::DenseNodeIds, entity,
          "node ids must be dense from 0 and match their position; found id " +
              std::to_string(node.id));
    if (!std::isfinite(node.accum_param) || node.accum_param < 0.0 || node.accum_param > 24.0)
      add(Rule::AccumParamRange, entity,
          "accumulation parameter must lie in [0, 24] hours");
    else if (node.accum_param > 12.0)
      add(Rule::AccumParamRange, entity,
          "accumulation parameter above 12 hours is suspicious; 10 to 11.5 is typical",
          Severity::Warning);
    if (std::isnan(node.transfer_capacity) || node.transfer_capacity < 0.0)
      add(Rule::NonNegativeNodeValues, entity, "transfer_capacity must be >= 0");
    if (!detail::finite_nonneg(node.op_time))
      add(Rule::NonNegativeNodeValues, entity, "op_time must be finite and >= 0");
    if (!detail::finite_nonneg(node.op_cost))
      add(Rule::NonNegativeNodeValues, entity, "op_cost must be finite and >= 0");
  }

  std::set<NodePair> arc_pairs;
  for (const ServiceArc& arc : inst.arcs) {
    std::string entity = detail::pair_entity("arc", arc.from, arc.to);
    if (!inst.has_node(arc.from) || !inst.has_node(arc.to)) {
      add(Rule::UnknownNodeRef, entity, "arc endpoint is not a node of this instance");
      continue;
    }
    if (arc.from == arc.to) add(Rule::SelfLoopArc, entity, "arc endpoints must differ");
    if (!arc_pairs.insert({arc.from, arc.to}).second)
      add(Rule::DuplicateArc, entity, "at most one arc per ordered node pair");
    if (!std::isfinite(arc.travel_time) || arc.travel_time <= 0.0)
      add(Rule::PositiveTravelTime, entity, "travel_time must be finite and > 0");
    if (!detail::finite_nonneg(arc.unit_trip_cost))
      add(Rule::NonNegativeTripCost, entity, "unit_trip_cost must be finite and >= 0");
    if (!std::isfinite(arc.carrier_size) || arc.carrier_size <= 0.0)
      add(Rule::PositiveCarrierSize, entity,
          "carrier_size divides service flow and must be finite and > 0");
  }

  std::set<NodePair> demand_pairs;
  for (const Demand& d : inst.demands) {
    std::string entity = detail::pair_entity("demand", d.origin, d.dest);
    if (!inst.has_node(d.origin) || !inst.has_node(d.dest)) {
      add(Rule::UnknownNodeRef, entity, "demand endpoint is not a node of this instance");
      continue;
    }
    if (d.origin == d.dest) add(Rule::SelfLoopDemand, entity, "demand endpoints must differ");
    if (!demand_pairs.insert({d.origin, d.dest}).second)
      add(Rule::DuplicateDemand, entity, "at most one demand per ordered node pair");
    if (!std::isfinite(d.volume) || d.volume <= 0.0)
      add(Rule::PositiveVolume, entity, "volume must be finite and > 0");
    if (std::isnan(d.deadline) || d.deadline <= 0.0)
      add(Rule::PositiveDeadline, entity, "deadline must be > 0 (or unbounded)");
  }

  if (!detail::finite_nonneg(inst.time_value))
    add(Rule::NonNegativeTimeValue, "instance", "time_value must be finite and >= 0");

  for (const auto& [pair, nodes] : inst.candidate_transfers) {
    std::string entity = detail::pair_entity("candidate-set", pair.first, pair.second);
    if (!inst.has_node(pair.first) || !inst.has_node(pair.second)) {
      add(Rule::UnknownNodeRef, entity, "candidate set pair is not a node pair of this instance");
      continue;
    }
    for (NodeId k : nodes) {
      if (!inst.has_node(k)) {
        add(Rule::UnknownNodeRef, entity,
            "candidate node " + std::to_string(k) + " is not a node of this instance");
      } else if (k == pair.first || k == pair.second) {
        add(Rule::CandidateSetMembers, entity,
            "candidate set must not contain the pair's own endpoints");
      }
    }
  }

  return out;
}

namespace detail {

inline bool in_range(NodeId id, std::size_t node_count) {
  return id >= 0 && static_cast<std::size_t>(id) < node_count;
}

// Cycle search over the functional graph of one destination. Every node has
// at most one outgoing pointer, so coloring along each walk suffices.
inline void find_destination_cycles(const RoutingTable& rt, NodeId dest,
                                    const std::vector<NodeId>& sources, std::size_t node_count,
                                    std::vector<Violation>& out) {
  std::vector<char> color(node_count, 0);  // 0 new, 1 on walk, 2 settled
  for (NodeId start : sources) {
    if (color[start]) continue;
    std::vector<NodeId> walk;
    NodeId cur = start;
    while (cur != dest && in_range(cur, node_count) && color[cur] == 0) {
      color[cur] = 1;
      walk.push_back(cur);
      auto next = rt.next(cur, dest);
      if (!next) break;
      cur = *next;
    }
    if (cur != dest && in_range(cur, node_count) && color[cur] == 1) {
      auto it = std::find(walk.begin(), walk.end(), cur);
      std::vector<NodeId> cycle(it, walk.end());
      std::ostringstream os;
      os << "next hops toward " << dest << " cycle through [";
      for (std::size_t i = 0; i < cycle.size(); ++i) os << (i ? " " : "") << cycle[i];
      os << "]";
      out.push_back({Rule::RouteCycle, Severity::Error,
                     "destination " + std::to_string(dest), os.str()});
    }
    for (NodeId v : walk) color[v] = 2;
  }
}

}  // namespace detail

// Checks the routing table against the instance: reference resolution,
// candidate membership, arc availability, direct-companion consistency,
// per-destination acyclicity, and (when the structure is sound) that the
// decisions cover exactly the pairs that carry flow.
inline std::vector<Violation> validate_solution(const Instance& inst, const RoutingTable& rt) {
  std::vector<Violation> out;
  InstanceIndex idx(inst);
  const std::size_t n = inst.nodes.size();

  for (const auto& [pair, hop] : rt.next_hop) {
    const auto [i, j] = pair;
    std::string entity = detail::pair_entity("route", i, j);
    if (!inst.has_node(i) || !inst.has_node(j) || !inst.has_node(hop)) {
      out.push_back({Rule::UnknownRouteRef, Severity::Error, entity,
                     "route references a node outside this instance"});
      continue;
    }
    if (i == j || hop == i) {
      out.push_back({Rule::SelfRoute, Severity::Error, entity,
                     "a flow never routes from a node to itself"});
      continue;
    }
    if (hop != j && !is_candidate_transfer(inst, i, j, hop))
      out.push_back({Rule::TransferNotCandidate, Severity::Error, entity,
                     "transfer node " + std::to_string(hop) +
                         " is not an allowed candidate for this pair"});
    if (idx.arc_pos(i, hop) < 0)
      out.push_back({Rule::MissingServiceArc, Severity::Error, entity,
                     "no service arc " + std::to_string(i) + "->" + std::to_string(hop)});
    if (hop != j && rt.next(i, hop) != std::optional<NodeId>(hop))
      out.push_back({Rule::DirectConsistency, Severity::Error, entity,
                     "transferring at " + std::to_string(hop) +
                         " requires the direct decision next_hop(" + std::to_string(i) + "," +
                         std::to_string(hop) + ") = " + std::to_string(hop)});
  }
  if (!out.empty()) return out;

  // Per-destination cycle checks.
  std::map<NodeId, std::vector<NodeId>> sources_by_dest;
  for (const auto& [pair, hop] : rt.next_hop) sources_by_dest[pair.second].push_back(pair.first);
  for (const auto& [dest, sources] : sources_by_dest)
    detail::find_destination_cycles(rt, dest, sources, n, out);
  if (!out.empty()) return out;

  // Domain check: walk each demand along its chain; every traversed pair needs
  // a decision and every decision must be traversed (or be the forced direct
  // companion of a transfer riding a served arc).
  std::set<NodePair> visited;
  std::set<NodePair> served_arcs;
  for (const auto& [dest, origins] : idx.demands_by_dest()) {
    for (const auto& [origin, volume] : origins) {
      NodeId cur = origin;
      while (cur != dest) {
        auto next = rt.next(cur, dest);
        if (!next) {
          out.push_back({Rule::MissingDecision, Severity::Error,
                         detail::pair_entity("route", cur, dest),
                         "flow destined to " + std::to_string(dest) + " reaches node " +
                             std::to_string(cur) + " but has no decision there"});
          break;
        }
        if (!visited.insert({cur, dest}).second) break;  // joined an already-walked chain
        served_arcs.insert({cur, *next});
        cur = *next;
      }
    }
  }
  for (const auto& [pair, hop] : rt.next_hop) {
    if (visited.count(pair)) continue;
    if (hop == pair.second && served_arcs.count(pair)) continue;
    out.push_back({Rule::ExtraDecision, Severity::Error,
                   detail::pair_entity("route", pair.first, pair.second),
                   "decision defined for a pair that carries no flow"});
  }
  return out;
}

// The underlying binary decision view of a routing table: one direct flag or
// one transfer choice per defined pair, never both.
struct DecisionVars {
  std::set<NodePair> direct;
  std::map<NodePair, NodeId> transfer;

  bool operator==(const DecisionVars&) const = default;
};

inline DecisionVars decision_vars(const RoutingTable& rt) {
  DecisionVars dv;
  for (const auto& [pair, hop] : rt.next_hop) {
    if (hop == pair.second)
      dv.direct.insert(pair);
    else
      dv.transfer.emplace(pair, hop);
  }
  return dv;
}

inline RoutingTable routing_from_decisions(const DecisionVars& dv) {
  RoutingTable rt;
  for (const NodePair& pair : dv.direct) rt.set(pair.first, pair.second, pair.second);
  for (const auto& [pair, hop] : dv.transfer) rt.set(pair.first, pair.second, hop);
  return rt;
}

}  // namespace netopt
