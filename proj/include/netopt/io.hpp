#pragma once
// File formats. Instances, solutions and evaluation reports are stored as
// UTF-8 JSON documents with a schema_version field, alphabetically ordered
// keys and newline-terminated output. The schema is strict: unknown fields
// are rejected so a typo can never be silently ignored. Unbounded capacities,
// deadlines and slacks are encoded by omitting the field.

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "netopt/evaluate.hpp"
#include "netopt/model.hpp"
#include "netopt/solve.hpp"
#include "netopt/validate.hpp"

namespace netopt {

struct ParseError : Error {
  int line;           // 1-based; 0 when the position is not byte-addressable
  std::string where;  // field path, e.g. "nodes[3].accum_param"
  ParseError(int line_, std::string where_, const std::string& message)
      : Error(describe(line_, where_, message)), line(line_), where(std::move(where_)) {}

  static std::string describe(int line, const std::string& where, const std::string& message) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!where.empty()) out += " (" + where + ")";
    return out + ": " + message;
  }
};

namespace detail {

using json = nlohmann::json;

inline int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "", e.what());
  }
}

inline void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(0, where, "expected an object");
}

inline void check_fields(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) throw ParseError(0, where, "unknown field \"" + it.key() + "\"");
  }
}

inline const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(0, where, std::string("missing field \"") + key + "\"");
  return *it;
}

inline double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(0, where, "expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(0, where, "expected an integer");
  return j.get<int>();
}

inline std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(0, where, "expected a string");
  return j.get<std::string>();
}

inline bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ParseError(0, where, "expected a boolean");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(0, where, "expected an array");
  return j;
}

inline void check_schema_version(const json& obj, const std::string& where) {
  std::string v = as_string(require(obj, where, "schema_version"), where + ".schema_version");
  if (v != "1") throw ParseError(0, where + ".schema_version", "unsupported version \"" + v + "\"");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

inline std::string serialize_instance(const Instance& inst) {
  using detail::json;
  json j;
  j["schema_version"] = "1";
  if (!inst.notes.empty()) j["notes"] = inst.notes;
  if (!inst.courier_class.empty()) j["courier_class"] = inst.courier_class;
  j["time_value"] = inst.time_value;
  json nodes = json::array();
  for (const Node& n : inst.nodes) {
    json e;
    e["id"] = n.id;
    if (!n.name.empty()) e["name"] = n.name;
    e["kind"] = std::string(to_string(n.kind));
    e["accum_param"] = n.accum_param;
    if (std::isfinite(n.transfer_capacity)) e["transfer_capacity"] = n.transfer_capacity;
    e["op_time"] = n.op_time;
    e["op_cost"] = n.op_cost;
    nodes.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  json arcs = json::array();
  for (const ServiceArc& a : inst.arcs) {
    json e;
    e["from"] = a.from;
    e["to"] = a.to;
    e["travel_time"] = a.travel_time;
    e["unit_trip_cost"] = a.unit_trip_cost;
    e["carrier_size"] = a.carrier_size;
    e["mode"] = std::string(to_string(a.mode));
    arcs.push_back(std::move(e));
  }
  j["arcs"] = std::move(arcs);
  json demands = json::array();
  for (const Demand& d : inst.demands) {
    json e;
    e["origin"] = d.origin;
    e["dest"] = d.dest;
    e["volume"] = d.volume;
    if (std::isfinite(d.deadline)) e["deadline"] = d.deadline;
    demands.push_back(std::move(e));
  }
  j["demands"] = std::move(demands);
  if (!inst.candidate_transfers.empty()) {
    json sets = json::array();
    for (const auto& [pair, members] : inst.candidate_transfers) {
      json e;
      e["from"] = pair.first;
      e["to"] = pair.second;
      std::vector<NodeId> sorted = members;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      e["nodes"] = sorted;
      sets.push_back(std::move(e));
    }
    j["candidate_transfers"] = std::move(sets);
  }
  return detail::dump(j);
}

// Parses and validates an instance document. Semantic violations (duplicate
// arcs, bad ranges, dangling references) surface as ValidationError so the
// caller can list every problem at once.
inline Instance parse_instance(const std::string& text) {
  using detail::json;
  json j = detail::parse_text(text);
  detail::expect_object(j, "instance");
  detail::check_fields(j, "instance",
                       {"schema_version", "notes", "courier_class", "time_value", "nodes",
                        "arcs", "demands", "candidate_transfers"});
  detail::check_schema_version(j, "instance");

  Instance inst;
  if (j.contains("notes")) inst.notes = detail::as_string(j["notes"], "instance.notes");
  if (j.contains("courier_class"))
    inst.courier_class = detail::as_string(j["courier_class"], "instance.courier_class");
  inst.time_value =
      detail::as_number(detail::require(j, "instance", "time_value"), "instance.time_value");

  const json& nodes = detail::as_array(detail::require(j, "instance", "nodes"), "instance.nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string where = "nodes[" + std::to_string(i) + "]";
    detail::expect_object(nodes[i], where);
    detail::check_fields(nodes[i], where,
                         {"id", "name", "kind", "accum_param", "transfer_capacity", "op_time",
                          "op_cost"});
    Node n;
    n.id = detail::as_int(detail::require(nodes[i], where, "id"), where + ".id");
    if (nodes[i].contains("name")) n.name = detail::as_string(nodes[i]["name"], where + ".name");
    std::string kind =
        detail::as_string(detail::require(nodes[i], where, "kind"), where + ".kind");
    auto parsed_kind = node_kind_from_string(kind);
    if (!parsed_kind)
      throw ParseError(0, where + ".kind", "unknown node kind \"" + kind + "\"");
    n.kind = *parsed_kind;
    n.accum_param = detail::as_number(detail::require(nodes[i], where, "accum_param"),
                                      where + ".accum_param");
    if (nodes[i].contains("transfer_capacity"))
      n.transfer_capacity =
          detail::as_number(nodes[i]["transfer_capacity"], where + ".transfer_capacity");
    n.op_time =
        detail::as_number(detail::require(nodes[i], where, "op_time"), where + ".op_time");
    n.op_cost =
        detail::as_number(detail::require(nodes[i], where, "op_cost"), where + ".op_cost");
    inst.nodes.push_back(std::move(n));
  }

  const json& arcs = detail::as_array(detail::require(j, "instance", "arcs"), "instance.arcs");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    std::string where = "arcs[" + std::to_string(i) + "]";
    detail::expect_object(arcs[i], where);
    detail::check_fields(arcs[i], where,
                         {"from", "to", "travel_time", "unit_trip_cost", "carrier_size", "mode"});
    ServiceArc a;
    a.from = detail::as_int(detail::require(arcs[i], where, "from"), where + ".from");
    a.to = detail::as_int(detail::require(arcs[i], where, "to"), where + ".to");
    a.travel_time = detail::as_number(detail::require(arcs[i], where, "travel_time"),
                                      where + ".travel_time");
    a.unit_trip_cost = detail::as_number(detail::require(arcs[i], where, "unit_trip_cost"),
                                         where + ".unit_trip_cost");
    a.carrier_size = detail::as_number(detail::require(arcs[i], where, "carrier_size"),
                                       where + ".carrier_size");
    std::string mode = detail::as_string(detail::require(arcs[i], where, "mode"), where + ".mode");
    auto parsed_mode = transport_mode_from_string(mode);
    if (!parsed_mode)
      throw ParseError(0, where + ".mode", "unknown transport mode \"" + mode + "\"");
    a.mode = *parsed_mode;
    inst.arcs.push_back(a);
  }

  const json& demands =
      detail::as_array(detail::require(j, "instance", "demands"), "instance.demands");
  for (std::size_t i = 0; i < demands.size(); ++i) {
    std::string where = "demands[" + std::to_string(i) + "]";
    detail::expect_object(demands[i], where);
    detail::check_fields(demands[i], where, {"origin", "dest", "volume", "deadline"});
    Demand d;
    d.origin = detail::as_int(detail::require(demands[i], where, "origin"), where + ".origin");
    d.dest = detail::as_int(detail::require(demands[i], where, "dest"), where + ".dest");
    d.volume =
        detail::as_number(detail::require(demands[i], where, "volume"), where + ".volume");
    if (demands[i].contains("deadline"))
      d.deadline = detail::as_number(demands[i]["deadline"], where + ".deadline");
    inst.demands.push_back(d);
  }

  if (j.contains("candidate_transfers")) {
    const json& sets = detail::as_array(j["candidate_transfers"], "instance.candidate_transfers");
    for (std::size_t i = 0; i < sets.size(); ++i) {
      std::string where = "candidate_transfers[" + std::to_string(i) + "]";
      detail::expect_object(sets[i], where);
      detail::check_fields(sets[i], where, {"from", "to", "nodes"});
      NodeId from = detail::as_int(detail::require(sets[i], where, "from"), where + ".from");
      NodeId to = detail::as_int(detail::require(sets[i], where, "to"), where + ".to");
      const json& members = detail::as_array(detail::require(sets[i], where, "nodes"),
                                             where + ".nodes");
      std::vector<NodeId> list;
      for (std::size_t m = 0; m < members.size(); ++m)
        list.push_back(
            detail::as_int(members[m], where + ".nodes[" + std::to_string(m) + "]"));
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      if (!inst.candidate_transfers.emplace(NodePair{from, to}, std::move(list)).second)
        throw ParseError(0, where, "duplicate candidate set for this pair");
    }
  }

  std::vector<Violation> violations = validate_instance(inst);
  if (has_errors(violations)) throw ValidationError(std::move(violations));
  return inst;
}

inline std::string serialize_solution(const RoutingTable& rt) {
  using detail::json;
  json j;
  j["schema_version"] = "1";
  json routes = json::array();
  for (const auto& [pair, hop] : rt.next_hop) {
    json e;
    e["from"] = pair.first;
    e["dest"] = pair.second;
    e["next"] = hop;
    routes.push_back(std::move(e));
  }
  j["routing"] = std::move(routes);
  return detail::dump(j);
}

namespace detail {

inline RoutingTable routing_from_json(const json& routes, const std::string& where) {
  RoutingTable rt;
  const json& arr = as_array(routes, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string rw = where + "[" + std::to_string(i) + "]";
    expect_object(arr[i], rw);
    check_fields(arr[i], rw, {"from", "dest", "next"});
    NodeId from = as_int(require(arr[i], rw, "from"), rw + ".from");
    NodeId dest = as_int(require(arr[i], rw, "dest"), rw + ".dest");
    NodeId next = as_int(require(arr[i], rw, "next"), rw + ".next");
    if (!rt.next_hop.emplace(NodePair{from, dest}, next).second)
      throw ParseError(0, rw, "duplicate decision for this pair");
  }
  return rt;
}

}  // namespace detail

// Reads a solution document: either a bare routing or a full solve result
// (whose report and trace are ignored here).
inline RoutingTable parse_solution(const std::string& text) {
  using detail::json;
  json j = detail::parse_text(text);
  detail::expect_object(j, "solution");
  detail::check_fields(j, "solution",
                       {"schema_version", "routing", "algorithm", "seed", "proven_optimal",
                        "report", "trace"});
  detail::check_schema_version(j, "solution");
  return detail::routing_from_json(detail::require(j, "solution", "routing"),
                                   "solution.routing");
}

namespace detail {

inline json report_to_json(const EvaluationReport& report) {
  json j;
  j["schema_version"] = "1";
  j["objective"] = report.objective;
  j["accumulation_cost"] = report.accumulation_cost;
  j["transport_cost"] = report.transport_cost;
  j["transfer_time_cost"] = report.transfer_time_cost;
  j["transfer_op_cost"] = report.transfer_op_cost;
  j["feasible"] = report.feasible;
  json arcs = json::array();
  for (const auto& [pair, ar] : report.per_arc) {
    json e;
    e["from"] = pair.first;
    e["to"] = pair.second;
    e["service_flow"] = ar.service_flow;
    e["frequency"] = ar.frequency;
    e["frequency_rounded"] = ar.frequency_rounded;
    e["headway_hours"] = ar.headway_hours;
    e["freq_delay_hours"] = ar.freq_delay_hours;
    e["arc_cost"] = ar.arc_cost;
    arcs.push_back(std::move(e));
  }
  j["per_arc"] = std::move(arcs);
  json nodes = json::array();
  for (const auto& [node, nr] : report.per_node) {
    json e;
    e["node"] = node;
    e["sort_load"] = nr.sort_load;
    if (std::isfinite(nr.capacity_slack)) e["capacity_slack"] = nr.capacity_slack;
    nodes.push_back(std::move(e));
  }
  j["per_node"] = std::move(nodes);
  json demands = json::array();
  for (const auto& [pair, dr] : report.per_demand) {
    json e;
    e["origin"] = pair.first;
    e["dest"] = pair.second;
    e["chain"] = dr.chain;
    e["delivery_time_hours"] = dr.delivery_time_hours;
    if (std::isfinite(dr.deadline_slack_hours))
      e["deadline_slack_hours"] = dr.deadline_slack_hours;
    demands.push_back(std::move(e));
  }
  j["per_demand"] = std::move(demands);
  return j;
}

inline EvaluationReport report_from_json(const json& j, const std::string& where) {
  expect_object(j, where);
  check_fields(j, where,
               {"schema_version", "objective", "accumulation_cost", "transport_cost",
                "transfer_time_cost", "transfer_op_cost", "feasible", "per_arc", "per_node",
                "per_demand"});
  check_schema_version(j, where);
  EvaluationReport report;
  report.objective = as_number(require(j, where, "objective"), where + ".objective");
  report.accumulation_cost =
      as_number(require(j, where, "accumulation_cost"), where + ".accumulation_cost");
  report.transport_cost =
      as_number(require(j, where, "transport_cost"), where + ".transport_cost");
  report.transfer_time_cost =
      as_number(require(j, where, "transfer_time_cost"), where + ".transfer_time_cost");
  report.transfer_op_cost =
      as_number(require(j, where, "transfer_op_cost"), where + ".transfer_op_cost");
  report.feasible = as_bool(require(j, where, "feasible"), where + ".feasible");
  const json& arcs = as_array(require(j, where, "per_arc"), where + ".per_arc");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    std::string aw = where + ".per_arc[" + std::to_string(i) + "]";
    expect_object(arcs[i], aw);
    check_fields(arcs[i], aw,
                 {"from", "to", "service_flow", "frequency", "frequency_rounded",
                  "headway_hours", "freq_delay_hours", "arc_cost"});
    ArcReport ar;
    NodeId from = as_int(require(arcs[i], aw, "from"), aw + ".from");
    NodeId to = as_int(require(arcs[i], aw, "to"), aw + ".to");
    ar.service_flow = as_number(require(arcs[i], aw, "service_flow"), aw + ".service_flow");
    ar.frequency = as_number(require(arcs[i], aw, "frequency"), aw + ".frequency");
    ar.frequency_rounded =
        as_int(require(arcs[i], aw, "frequency_rounded"), aw + ".frequency_rounded");
    ar.headway_hours = as_number(require(arcs[i], aw, "headway_hours"), aw + ".headway_hours");
    ar.freq_delay_hours =
        as_number(require(arcs[i], aw, "freq_delay_hours"), aw + ".freq_delay_hours");
    ar.arc_cost = as_number(require(arcs[i], aw, "arc_cost"), aw + ".arc_cost");
    report.per_arc[{from, to}] = ar;
  }
  const json& nodes = as_array(require(j, where, "per_node"), where + ".per_node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string nw = where + ".per_node[" + std::to_string(i) + "]";
    expect_object(nodes[i], nw);
    check_fields(nodes[i], nw, {"node", "sort_load", "capacity_slack"});
    NodeReport nr;
    NodeId node = as_int(require(nodes[i], nw, "node"), nw + ".node");
    nr.sort_load = as_number(require(nodes[i], nw, "sort_load"), nw + ".sort_load");
    if (nodes[i].contains("capacity_slack"))
      nr.capacity_slack = as_number(nodes[i]["capacity_slack"], nw + ".capacity_slack");
    report.per_node[node] = nr;
  }
  const json& demands = as_array(require(j, where, "per_demand"), where + ".per_demand");
  for (std::size_t i = 0; i < demands.size(); ++i) {
    std::string dw = where + ".per_demand[" + std::to_string(i) + "]";
    expect_object(demands[i], dw);
    check_fields(demands[i], dw,
                 {"origin", "dest", "chain", "delivery_time_hours", "deadline_slack_hours"});
    DemandReport dr;
    NodeId origin = as_int(require(demands[i], dw, "origin"), dw + ".origin");
    NodeId dest = as_int(require(demands[i], dw, "dest"), dw + ".dest");
    const json& chain = as_array(require(demands[i], dw, "chain"), dw + ".chain");
    for (std::size_t m = 0; m < chain.size(); ++m)
      dr.chain.push_back(as_int(chain[m], dw + ".chain[" + std::to_string(m) + "]"));
    dr.delivery_time_hours =
        as_number(require(demands[i], dw, "delivery_time_hours"), dw + ".delivery_time_hours");
    if (demands[i].contains("deadline_slack_hours"))
      dr.deadline_slack_hours =
          as_number(demands[i]["deadline_slack_hours"], dw + ".deadline_slack_hours");
    report.per_demand[{origin, dest}] = std::move(dr);
  }
  return report;
}

}  // namespace detail

inline std::string serialize_report(const EvaluationReport& report) {
  return detail::dump(detail::report_to_json(report));
}

inline EvaluationReport parse_report(const std::string& text) {
  return detail::report_from_json(detail::parse_text(text), "report");
}

// Full solver output: routing plus its report and search trace. Wall time is
// intentionally not stored so identical runs produce identical files.
inline std::string serialize_result(const SolveResult& result, const SolveConfig& cfg) {
  using detail::json;
  json j;
  j["schema_version"] = "1";
  j["algorithm"] = cfg.algorithm == Algorithm::Exact ? "exact" : "anneal";
  j["seed"] = cfg.seed;
  j["proven_optimal"] = result.proven_optimal;
  json routes = json::array();
  for (const auto& [pair, hop] : result.routing.next_hop) {
    json e;
    e["from"] = pair.first;
    e["dest"] = pair.second;
    e["next"] = hop;
    routes.push_back(std::move(e));
  }
  j["routing"] = std::move(routes);
  j["report"] = detail::report_to_json(result.report);
  json trace;
  trace["iterations"] = result.trace.iterations;
  json improvements = json::array();
  for (const TracePoint& p : result.trace.best_objective_by_iteration) {
    json e;
    e["iteration"] = p.iteration;
    e["objective"] = p.objective;
    improvements.push_back(std::move(e));
  }
  trace["improvements"] = std::move(improvements);
  j["trace"] = std::move(trace);
  return detail::dump(j);
}

}  // namespace netopt
