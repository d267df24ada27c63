#pragma once
// Objective evaluation and constraint checks for a routed solution. The daily
// cost decomposes into four parts:
//   accumulation    time_value * accum_param * carrier_size per served arc
//   transport       frequency * unit_trip_cost per served arc
//   transfer time   sort_load * time_value * op_time per node
//   transfer ops    sort_load * op_cost per node
// Feasibility additionally requires every sorting load within capacity and
// every bounded demand delivered by its deadline.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "netopt/flow.hpp"
#include "netopt/model.hpp"

namespace netopt {

struct UndefinedArcError : Error {
  NodeId from;
  NodeId to;
  UndefinedArcError(NodeId from_, NodeId to_)
      : Error("arc " + std::to_string(from_) + "->" + std::to_string(to_) +
              " is not served by this solution"),
        from(from_),
        to(to_) {}
};

struct ArcReport {
  double service_flow = 0.0;
  double frequency = 0.0;        // carriers/day, exact quotient
  int frequency_rounded = 0;     // whole carriers/day, reporting only
  double headway_hours = 0.0;    // 24 / frequency
  double freq_delay_hours = 0.0; // per-unit waiting before departure
  double arc_cost = 0.0;         // accumulation + transport share of this arc

  bool operator==(const ArcReport&) const = default;
};

struct NodeReport {
  double sort_load = 0.0;
  double capacity_slack = kUnbounded;  // transfer_capacity - sort_load

  bool operator==(const NodeReport&) const = default;
};

struct DemandReport {
  std::vector<NodeId> chain;
  double delivery_time_hours = 0.0;
  double deadline_slack_hours = kUnbounded;  // deadline - delivery time

  bool operator==(const DemandReport&) const = default;
};

struct EvaluationReport {
  double objective = 0.0;
  double accumulation_cost = 0.0;
  double transport_cost = 0.0;
  double transfer_time_cost = 0.0;
  double transfer_op_cost = 0.0;
  std::map<NodePair, ArcReport> per_arc;      // served arcs only
  std::map<NodeId, NodeReport> per_node;      // every node
  std::map<NodePair, DemandReport> per_demand;
  bool feasible = false;

  bool operator==(const EvaluationReport&) const = default;
};

// Average hours one courier unit waits at node k for the next carrier toward
// v: accum_param(k) * carrier_size(k,v) / service_flow(k,v). Half the headway
// when accum_param is 12, the evenly-arriving case.
inline double freq_delay(const Instance& inst, const FlowState& fs, NodeId k, NodeId v) {
  double flow = fs.service_flow_at(k, v);
  if (!(flow > 0.0)) throw UndefinedArcError(k, v);
  const ServiceArc* arc = nullptr;
  for (const ServiceArc& a : inst.arcs)
    if (a.from == k && a.to == v) arc = &a;
  if (!arc) throw UndefinedArcError(k, v);
  return inst.nodes[k].accum_param * arc->carrier_size / flow;
}

namespace detail {

// Door-to-door hours along a chain. Direct chains take the raw travel time;
// otherwise each intermediate node adds its operation time plus the waiting
// for the next carrier. ServiceFlowFn(from, to, arc_pos) -> units/day.
template <class ServiceFlowFn>
double chain_time(const InstanceIndex& idx, const std::vector<NodeId>& nodes,
                  ServiceFlowFn&& service_flow_at) {
  const Instance& inst = idx.instance();
  double time = 0.0;
  for (std::size_t m = 0; m + 1 < nodes.size(); ++m) {
    int pos = idx.arc_pos(nodes[m], nodes[m + 1]);
    if (pos < 0 || !(service_flow_at(nodes[m], nodes[m + 1], pos) > 0.0))
      throw UndefinedArcError(nodes[m], nodes[m + 1]);
    time += inst.arcs[pos].travel_time;
  }
  for (std::size_t m = 1; m + 1 < nodes.size(); ++m) {
    NodeId k = nodes[m];
    int pos = idx.arc_pos(k, nodes[m + 1]);
    double flow = service_flow_at(k, nodes[m + 1], pos);
    time += inst.nodes[k].op_time +
            inst.nodes[k].accum_param * inst.arcs[pos].carrier_size / flow;
  }
  return time;
}

struct CoreCosts {
  double accumulation = 0.0;
  double transport = 0.0;
  double transfer_time = 0.0;
  double transfer_op = 0.0;
  double capacity_deficit = 0.0;  // total overload, units/day
  double deadline_deficit = 0.0;  // total lateness, hours
  bool feasible = true;

  double objective() const { return accumulation + transport + transfer_time + transfer_op; }
};

// Single implementation behind evaluate() and the solvers' inner loop. Sums
// run in fixed key order so results do not depend on scheduling.
inline CoreCosts run_costs(const InstanceIndex& idx, const RoutingTable& rt, EvalScratch& s,
                           EvaluationReport* report) {
  const Instance& inst = idx.instance();
  run_flows(idx, rt, s, nullptr);

  CoreCosts costs;
  const double lambda = inst.time_value;
  for (int a : s.served_arcs) {
    const ServiceArc& arc = inst.arcs[a];
    costs.accumulation += lambda * inst.nodes[arc.from].accum_param * arc.carrier_size;
    costs.transport += (s.service[a] / arc.carrier_size) * arc.unit_trip_cost;
  }
  for (NodeId k : s.sorted_nodes) {
    costs.transfer_time += s.sort_load[k] * lambda * inst.nodes[k].op_time;
    costs.transfer_op += s.sort_load[k] * inst.nodes[k].op_cost;
    double over = s.sort_load[k] - inst.nodes[k].transfer_capacity;
    if (over > 0.0) costs.capacity_deficit += over;
  }

  auto dense_flow = [&s](NodeId, NodeId, int pos) { return s.service[pos]; };
  std::vector<NodeId> chain;
  for (const Demand& d : idx.demands_sorted()) {
    chain.clear();
    chain.push_back(d.origin);
    NodeId cur = d.origin;
    while (cur != d.dest) {
      cur = *rt.next(cur, d.dest);  // run_flows verified completeness
      chain.push_back(cur);
    }
    double time = chain_time(idx, chain, dense_flow);
    if (std::isfinite(d.deadline)) {
      double late = time - d.deadline;
      if (late > 0.0) costs.deadline_deficit += late;
    }
    if (report) {
      DemandReport dr;
      dr.chain = chain;
      dr.delivery_time_hours = time;
      dr.deadline_slack_hours = d.deadline - time;  // stays unbounded when no deadline
      report->per_demand[{d.origin, d.dest}] = std::move(dr);
    }
  }

  costs.feasible = costs.capacity_deficit == 0.0 && costs.deadline_deficit == 0.0;

  if (report) {
    report->accumulation_cost = costs.accumulation;
    report->transport_cost = costs.transport;
    report->transfer_time_cost = costs.transfer_time;
    report->transfer_op_cost = costs.transfer_op;
    report->objective = costs.objective();
    report->feasible = costs.feasible;
    for (int a : s.served_arcs) {
      const ServiceArc& arc = inst.arcs[a];
      ArcReport ar;
      ar.service_flow = s.service[a];
      ar.frequency = s.service[a] / arc.carrier_size;
      ar.frequency_rounded = static_cast<int>(std::ceil(ar.frequency - 1e-12));
      ar.headway_hours = 24.0 / ar.frequency;
      ar.freq_delay_hours = inst.nodes[arc.from].accum_param * arc.carrier_size / s.service[a];
      ar.arc_cost = lambda * inst.nodes[arc.from].accum_param * arc.carrier_size +
                    ar.frequency * arc.unit_trip_cost;
      report->per_arc[{arc.from, arc.to}] = ar;
    }
    for (NodeId k = 0; k < static_cast<NodeId>(inst.nodes.size()); ++k) {
      NodeReport nr;
      nr.sort_load = s.sort_load[k];
      nr.capacity_slack = inst.nodes[k].transfer_capacity - s.sort_load[k];
      report->per_node[k] = nr;
    }
  }
  return costs;
}

}  // namespace detail

// Door-to-door delivery hours of one extracted chain under the given flows.
inline double delivery_time(const Instance& inst, const FlowState& fs,
                            const TransferChain& chain) {
  InstanceIndex idx(inst);
  return detail::chain_time(idx, chain.nodes, [&fs](NodeId from, NodeId to, int) {
    return fs.service_flow_at(from, to);
  });
}

// Full evaluation of a routed solution: propagates flows, prices every term
// of the daily objective, and checks capacities and deadlines.
inline EvaluationReport evaluate(const Instance& inst, const RoutingTable& rt) {
  InstanceIndex idx(inst);
  detail::EvalScratch scratch;
  EvaluationReport report;
  detail::run_costs(idx, rt, scratch, &report);
  return report;
}

}  // namespace netopt
