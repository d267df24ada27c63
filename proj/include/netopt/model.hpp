#pragma once
// Core data model for courier transportation network design: nodes, directed
// service arcs, daily demands, global parameters, and the next-hop routing
// table that encodes a complete transportation plan.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netopt {

using NodeId = int;
using NodePair = std::pair<NodeId, NodeId>;

inline constexpr NodeId kInvalidNode = -1;

// Sentinel for unbounded transfer capacities and deadlines.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class NodeKind {
  LocalDistributionCenter,
  SortingCenter,
  Airport,
  RailStation,
  TerminalDistributionCenter,
};

enum class TransportMode { Road, Rail, Air };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::LocalDistributionCenter: return "local_distribution_center";
    case NodeKind::SortingCenter: return "sorting_center";
    case NodeKind::Airport: return "airport";
    case NodeKind::RailStation: return "rail_station";
    case NodeKind::TerminalDistributionCenter: return "terminal_distribution_center";
  }
  return "unknown";
}

inline std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  if (s == "local_distribution_center") return NodeKind::LocalDistributionCenter;
  if (s == "sorting_center") return NodeKind::SortingCenter;
  if (s == "airport") return NodeKind::Airport;
  if (s == "rail_station") return NodeKind::RailStation;
  if (s == "terminal_distribution_center") return NodeKind::TerminalDistributionCenter;
  return std::nullopt;
}

inline std::string_view to_string(TransportMode m) {
  switch (m) {
    case TransportMode::Road: return "road";
    case TransportMode::Rail: return "rail";
    case TransportMode::Air: return "air";
  }
  return "unknown";
}

inline std::optional<TransportMode> transport_mode_from_string(std::string_view s) {
  if (s == "road") return TransportMode::Road;
  if (s == "rail") return TransportMode::Rail;
  if (s == "air") return TransportMode::Air;
  return std::nullopt;
}

struct Node {
  NodeId id = kInvalidNode;
  std::string name;  // optional display label
  NodeKind kind = NodeKind::LocalDistributionCenter;
  // Hours-equivalent waiting factor: the total daily waiting of couriers on a
  // served outgoing arc equals accum_param * carrier_size unit-hours. 12 under
  // perfectly even arrivals; 10 to 11.5 is typical in practice.
  double accum_param = 12.0;
  double transfer_capacity = kUnbounded;  // units/day that can be sorted here
  double op_time = 0.0;                   // hours per transfer operation
  double op_cost = 0.0;                   // currency per unit sorted

  bool operator==(const Node&) const = default;
};

struct ServiceArc {
  NodeId from = kInvalidNode;
  NodeId to = kInvalidNode;
  double travel_time = 0.0;     // hours
  double unit_trip_cost = 0.0;  // currency per carrier dispatch
  double carrier_size = 60.0;   // units per carrier
  TransportMode mode = TransportMode::Road;

  bool operator==(const ServiceArc&) const = default;
};

struct Demand {
  NodeId origin = kInvalidNode;
  NodeId dest = kInvalidNode;
  double volume = 0.0;           // units/day
  double deadline = kUnbounded;  // hours, door to door

  bool operator==(const Demand&) const = default;
};

struct Instance {
  std::vector<Node> nodes;  // ids dense from 0, node i at position i
  std::vector<ServiceArc> arcs;
  std::vector<Demand> demands;
  double time_value = 1.0;  // currency per unit-hour, converts waiting into cost
  std::string courier_class;  // free-text label, one class per instance
  std::string notes;
  // Allowed first-transfer nodes per (origin-of-leg, destination) pair.
  // Missing entry: every node except the pair's endpoints. Sets are kept
  // sorted and deduplicated.
  std::map<NodePair, std::vector<NodeId>> candidate_transfers;

  bool has_node(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < nodes.size();
  }

  bool operator==(const Instance&) const = default;
};

inline std::string display_name(const Instance& inst, NodeId id) {
  if (inst.has_node(id) && !inst.nodes[id].name.empty()) return inst.nodes[id].name;
  return "n" + std::to_string(id);
}

// Allowed first transfer nodes for a leg from `i` toward final destination `j`.
inline std::vector<NodeId> candidate_transfers_for(const Instance& inst, NodeId i, NodeId j) {
  auto it = inst.candidate_transfers.find({i, j});
  if (it != inst.candidate_transfers.end()) return it->second;
  std::vector<NodeId> all;
  all.reserve(inst.nodes.size());
  for (NodeId k = 0; k < static_cast<NodeId>(inst.nodes.size()); ++k)
    if (k != i && k != j) all.push_back(k);
  return all;
}

inline bool is_candidate_transfer(const Instance& inst, NodeId i, NodeId j, NodeId k) {
  if (k == i || k == j) return false;
  auto it = inst.candidate_transfers.find({i, j});
  if (it == inst.candidate_transfers.end()) return inst.has_node(k);
  for (NodeId c : it->second)
    if (c == k) return true;
  return false;
}

// The solution encoding: for every (node, final destination) pair that carries
// courier flow, the next node the flow is handed to. next_hop(i,j) == j is a
// direct service; next_hop(i,j) == k means the flow is sorted at k first.
// Choosing k requires the companion entry next_hop(i,k) == k, i.e. a direct
// service from i to k.
struct RoutingTable {
  std::map<NodePair, NodeId> next_hop;

  std::optional<NodeId> next(NodeId i, NodeId j) const {
    auto it = next_hop.find({i, j});
    if (it == next_hop.end()) return std::nullopt;
    return it->second;
  }
  void set(NodeId i, NodeId j, NodeId hop) { next_hop[{i, j}] = hop; }
  bool empty() const { return next_hop.empty(); }

  bool operator==(const RoutingTable&) const = default;
  // Lexicographic order over (i, j, hop) triples; the solver tie-break.
  bool operator<(const RoutingTable& other) const { return next_hop < other.next_hop; }
};

enum class Severity { Warning, Error };

enum class Rule {
  // instance rules
  DenseNodeIds,
  AccumParamRange,
  NonNegativeNodeValues,
  UnknownNodeRef,
  SelfLoopArc,
  DuplicateArc,
  PositiveTravelTime,
  NonNegativeTripCost,
  PositiveCarrierSize,
  SelfLoopDemand,
  DuplicateDemand,
  PositiveVolume,
  PositiveDeadline,
  NonNegativeTimeValue,
  CandidateSetMembers,
  // solution rules
  UnknownRouteRef,
  SelfRoute,
  TransferNotCandidate,
  MissingServiceArc,
  DirectConsistency,
  RouteCycle,
  MissingDecision,
  ExtraDecision,
};

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::DenseNodeIds: return "dense-node-ids";
    case Rule::AccumParamRange: return "accum-param-range";
    case Rule::NonNegativeNodeValues: return "non-negative-node-values";
    case Rule::UnknownNodeRef: return "unknown-node-ref";
    case Rule::SelfLoopArc: return "self-loop-arc";
    case Rule::DuplicateArc: return "duplicate-arc";
    case Rule::PositiveTravelTime: return "positive-travel-time";
    case Rule::NonNegativeTripCost: return "non-negative-trip-cost";
    case Rule::PositiveCarrierSize: return "positive-carrier-size";
    case Rule::SelfLoopDemand: return "self-loop-demand";
    case Rule::DuplicateDemand: return "duplicate-demand";
    case Rule::PositiveVolume: return "positive-volume";
    case Rule::PositiveDeadline: return "positive-deadline";
    case Rule::NonNegativeTimeValue: return "non-negative-time-value";
    case Rule::CandidateSetMembers: return "candidate-set-members";
    case Rule::UnknownRouteRef: return "unknown-route-ref";
    case Rule::SelfRoute: return "self-route";
    case Rule::TransferNotCandidate: return "transfer-not-candidate";
    case Rule::MissingServiceArc: return "missing-service-arc";
    case Rule::DirectConsistency: return "direct-consistency";
    case Rule::RouteCycle: return "route-cycle";
    case Rule::MissingDecision: return "missing-decision";
    case Rule::ExtraDecision: return "extra-decision";
  }
  return "unknown";
}

struct Violation {
  Rule rule;
  Severity severity = Severity::Error;
  std::string entity;   // e.g. "node 3", "arc 2->5", "route (0,4)"
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  std::vector<Violation> violations;
  explicit ValidationError(std::vector<Violation> v)
      : Error(v.empty() ? "validation failed"
                        : "validation failed: [" + std::string(to_string(v.front().rule)) +
                              "] " + v.front().message),
        violations(std::move(v)) {}
};

// Lookup structures shared by the algorithms. Build once per instance; the
// referenced instance must outlive the index.
class InstanceIndex {
 public:
  explicit InstanceIndex(const Instance& inst) : inst_(&inst) {
    out_.resize(inst.nodes.size());
    for (int a = 0; a < static_cast<int>(inst.arcs.size()); ++a) {
      const ServiceArc& arc = inst.arcs[a];
      if (!inst.has_node(arc.from) || !inst.has_node(arc.to)) continue;
      arc_pos_.emplace(NodePair{arc.from, arc.to}, a);
      out_[arc.from].push_back({arc.to, a});
    }
    for (auto& adj : out_) std::sort(adj.begin(), adj.end());
    for (const Demand& d : inst.demands) {
      if (!inst.has_node(d.origin) || !inst.has_node(d.dest)) continue;
      demands_by_dest_[d.dest].push_back({d.origin, d.volume});
    }
    for (auto& [dest, origins] : demands_by_dest_)
      std::sort(origins.begin(), origins.end());
    demands_sorted_ = inst.demands;
    std::sort(demands_sorted_.begin(), demands_sorted_.end(),
              [](const Demand& a, const Demand& b) {
                return NodePair{a.origin, a.dest} < NodePair{b.origin, b.dest};
              });
  }

  const Instance& instance() const { return *inst_; }

  int arc_pos(NodeId from, NodeId to) const {
    auto it = arc_pos_.find({from, to});
    return it == arc_pos_.end() ? -1 : it->second;
  }

  const ServiceArc* arc(NodeId from, NodeId to) const {
    int pos = arc_pos(from, to);
    return pos < 0 ? nullptr : &inst_->arcs[pos];
  }

  // Outgoing (to, arc position) pairs, ascending by target id.
  const std::vector<std::pair<NodeId, int>>& out(NodeId from) const { return out_[from]; }

  // Destination -> sorted (origin, volume) list.
  const std::map<NodeId, std::vector<std::pair<NodeId, double>>>& demands_by_dest() const {
    return demands_by_dest_;
  }

  // Demands ordered by (origin, dest).
  const std::vector<Demand>& demands_sorted() const { return demands_sorted_; }

 private:
  const Instance* inst_;
  std::map<NodePair, int> arc_pos_;
  std::vector<std::vector<std::pair<NodeId, int>>> out_;
  std::map<NodeId, std::vector<std::pair<NodeId, double>>> demands_by_dest_;
  std::vector<Demand> demands_sorted_;
};

}  // namespace netopt
