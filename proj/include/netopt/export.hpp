#pragma once
// Graphviz DOT export for inspection: nodes labeled by kind, arcs by travel
// time, served arcs emphasized with their flow and frequency, and each
// demand's chain traced in its own color.

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netopt/evaluate.hpp"
#include "netopt/flow.hpp"
#include "netopt/model.hpp"

namespace netopt {

namespace detail {

inline const char* chain_color(std::size_t demand_index) {
  static const char* palette[] = {"#1b6ca8", "#b3541e", "#2e7d32", "#7b1fa2",
                                  "#c2185b", "#00695c", "#5d4037", "#455a64"};
  return palette[demand_index % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string trim_number(double v, int decimals = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  std::string s = os.str();
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

// Emits a DOT document. With a routing table the demand chains are derived
// and highlighted; with a report the served arcs carry flow and frequency
// annotations. Output is deterministic.
inline std::string export_graph(const Instance& inst, const RoutingTable* rt = nullptr,
                                const EvaluationReport* report = nullptr) {
  std::ostringstream os;
  os << "digraph courier_network {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box, fontsize=10];\n";
  for (const Node& n : inst.nodes) {
    os << "  n" << n.id << " [label=\"" << display_name(inst, n.id) << "\\n("
       << to_string(n.kind) << ")\"];\n";
  }

  // Chains per demand, in (origin, dest) order.
  std::map<NodePair, std::vector<NodeId>> chains;
  if (report) {
    for (const auto& [pair, dr] : report->per_demand) chains[pair] = dr.chain;
  } else if (rt) {
    std::vector<Demand> sorted = inst.demands;
    std::sort(sorted.begin(), sorted.end(), [](const Demand& a, const Demand& b) {
      return NodePair{a.origin, a.dest} < NodePair{b.origin, b.dest};
    });
    for (const Demand& d : sorted) chains[{d.origin, d.dest}] = extract_chain(inst, *rt, d).nodes;
  }
  std::map<NodePair, std::vector<std::size_t>> arc_demands;  // arc -> demand indices
  {
    std::size_t index = 0;
    for (const auto& [pair, nodes] : chains) {
      for (std::size_t m = 0; m + 1 < nodes.size(); ++m)
        arc_demands[{nodes[m], nodes[m + 1]}].push_back(index);
      ++index;
    }
  }

  for (const ServiceArc& arc : inst.arcs) {
    os << "  n" << arc.from << " -> n" << arc.to;
    std::string label = detail::trim_number(arc.travel_time) + "h";
    std::vector<std::string> attrs;
    const ArcReport* ar = nullptr;
    if (report) {
      auto it = report->per_arc.find({arc.from, arc.to});
      if (it != report->per_arc.end()) ar = &it->second;
    }
    if (ar) {
      label += "\\nF=" + detail::trim_number(ar->service_flow) +
               " phi=" + detail::trim_number(ar->frequency);
      attrs.push_back("penwidth=2.2");
    }
    auto used = arc_demands.find({arc.from, arc.to});
    if (used != arc_demands.end()) {
      std::string colors;
      for (std::size_t d : used->second) {
        if (!colors.empty()) colors += ":";
        colors += detail::chain_color(d);
      }
      attrs.push_back("color=\"" + colors + "\"");
      if (!ar) attrs.push_back("penwidth=2.2");
    } else if (report || rt) {
      attrs.push_back("color=\"#b0b0b0\"");
    }
    os << " [label=\"" << label << "\", fontsize=9";
    for (const std::string& a : attrs) os << ", " << a;
    os << "];\n";
  }

  // Legend: one line per demand in its chain color.
  std::size_t index = 0;
  for (const auto& [pair, nodes] : chains) {
    os << "  // demand " << display_name(inst, pair.first) << " -> "
       << display_name(inst, pair.second) << " uses color " << detail::chain_color(index)
       << " via";
    for (NodeId v : nodes) os << " " << display_name(inst, v);
    os << "\n";
    ++index;
  }
  os << "}\n";
  return os.str();
}

}  // namespace netopt
