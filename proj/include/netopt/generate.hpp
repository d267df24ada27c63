#pragma once
// Seeded random instance generator. Output is a deterministic function of the
// spec, always passes validation, and every demand is guaranteed a chain
// within the transfer budget (the arc set is redrawn until that holds).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "netopt/flow.hpp"
#include "netopt/io.hpp"
#include "netopt/model.hpp"
#include "netopt/rng.hpp"
#include "netopt/validate.hpp"

namespace netopt {

struct GenerationFailure : Error {
  using Error::Error;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Range&) const = default;
};

struct GeneratorSpec {
  std::uint64_t seed = 1;
  // Node counts per kind.
  int local_centers = 3;
  int sorting_centers = 2;
  int airports = 0;
  int rail_stations = 0;
  int terminals = 3;
  // Arc inclusion probability per transport mode. Air arcs connect airport
  // pairs, rail arcs connect rail-station pairs, everything else is road.
  double road_density = 0.5;
  double rail_density = 0.5;
  double air_density = 0.5;
  int demand_count = 4;
  double time_value = 1.0;
  Range travel_time{2.0, 30.0};
  Range trip_cost{50.0, 800.0};
  Range carrier_size{60.0, 60.0};
  Range accum_param{10.0, 11.5};
  Range op_time{0.5, 2.0};
  Range op_cost{0.5, 3.0};
  Range transfer_capacity{500.0, 5000.0};
  Range volume{5.0, 50.0};
  // Deadline = tightness * (travel + worst-case transfer time) along the
  // fewest-hop chain; values >= 1 keep that chain deadline-feasible.
  double deadline_tightness = 1.5;
  double unbounded_deadline_fraction = 0.25;
  int max_transfers = 4;

  bool operator==(const GeneratorSpec&) const = default;
};

namespace detail {

inline void check_range(const Range& r, const char* name, bool positive_lo) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi || r.lo < 0.0 ||
      (positive_lo && r.lo <= 0.0))
    throw GenerationFailure(std::string("generator range \"") + name + "\" is invalid");
}

inline void check_spec(const GeneratorSpec& spec) {
  if (spec.local_centers < 0 || spec.sorting_centers < 0 || spec.airports < 0 ||
      spec.rail_stations < 0 || spec.terminals < 0)
    throw GenerationFailure("node counts must be non-negative");
  int total = spec.local_centers + spec.sorting_centers + spec.airports +
              spec.rail_stations + spec.terminals;
  if (spec.demand_count > 0 && total < 2)
    throw GenerationFailure("need at least two nodes to place demands");
  for (double d : {spec.road_density, spec.rail_density, spec.air_density})
    if (!(d >= 0.0 && d <= 1.0)) throw GenerationFailure("densities must lie in [0, 1]");
  if (spec.demand_count < 0) throw GenerationFailure("demand_count must be non-negative");
  if (!(spec.time_value >= 0.0) || !std::isfinite(spec.time_value))
    throw GenerationFailure("time_value must be finite and non-negative");
  check_range(spec.travel_time, "travel_time", true);
  check_range(spec.trip_cost, "trip_cost", false);
  check_range(spec.carrier_size, "carrier_size", true);
  check_range(spec.accum_param, "accum_param", false);
  if (spec.accum_param.hi > 12.0)
    throw GenerationFailure("accum_param above 12 hours is rejected by validation");
  check_range(spec.op_time, "op_time", false);
  check_range(spec.op_cost, "op_cost", false);
  check_range(spec.transfer_capacity, "transfer_capacity", false);
  check_range(spec.volume, "volume", true);
  if (!(spec.deadline_tightness > 0.0))
    throw GenerationFailure("deadline_tightness must be positive");
  if (!(spec.unbounded_deadline_fraction >= 0.0 && spec.unbounded_deadline_fraction <= 1.0))
    throw GenerationFailure("unbounded_deadline_fraction must lie in [0, 1]");
  if (spec.max_transfers < 0) throw GenerationFailure("max_transfers must be non-negative");
}

inline TransportMode mode_between(const Node& a, const Node& b) {
  if (a.kind == NodeKind::Airport && b.kind == NodeKind::Airport) return TransportMode::Air;
  if (a.kind == NodeKind::RailStation && b.kind == NodeKind::RailStation)
    return TransportMode::Rail;
  return TransportMode::Road;
}

}  // namespace detail

inline Instance generate(const GeneratorSpec& spec) {
  detail::check_spec(spec);
  Rng rng(splitmix64(spec.seed));

  Instance inst;
  inst.time_value = spec.time_value;
  auto add_nodes = [&](int count, NodeKind kind, const char* prefix, bool sorts) {
    for (int i = 0; i < count; ++i) {
      Node n;
      n.id = static_cast<NodeId>(inst.nodes.size());
      n.name = prefix + std::to_string(i + 1);
      n.kind = kind;
      n.accum_param = rng.uniform(spec.accum_param.lo, spec.accum_param.hi);
      n.transfer_capacity =
          sorts ? rng.uniform(spec.transfer_capacity.lo, spec.transfer_capacity.hi)
                : kUnbounded;
      n.op_time = rng.uniform(spec.op_time.lo, spec.op_time.hi);
      n.op_cost = rng.uniform(spec.op_cost.lo, spec.op_cost.hi);
      inst.nodes.push_back(std::move(n));
    }
  };
  add_nodes(spec.local_centers, NodeKind::LocalDistributionCenter, "S", false);
  add_nodes(spec.sorting_centers, NodeKind::SortingCenter, "H", true);
  add_nodes(spec.airports, NodeKind::Airport, "A", true);
  add_nodes(spec.rail_stations, NodeKind::RailStation, "R", true);
  add_nodes(spec.terminals, NodeKind::TerminalDistributionCenter, "T", false);
  const int n = static_cast<int>(inst.nodes.size());

  // Demand endpoints: local centers ship to terminals when both exist,
  // otherwise any distinct ordered pair.
  std::vector<NodeId> origins, dests;
  for (const Node& node : inst.nodes) {
    if (node.kind == NodeKind::LocalDistributionCenter) origins.push_back(node.id);
    if (node.kind == NodeKind::TerminalDistributionCenter) dests.push_back(node.id);
  }
  if (origins.empty() || dests.empty()) {
    origins.clear();
    dests.clear();
    for (const Node& node : inst.nodes) {
      origins.push_back(node.id);
      dests.push_back(node.id);
    }
  }
  std::vector<NodePair> pool;
  for (NodeId o : origins)
    for (NodeId d : dests)
      if (o != d) pool.push_back({o, d});
  if (spec.demand_count > static_cast<int>(pool.size()))
    throw GenerationFailure("demand_count exceeds the number of distinct origin/dest pairs");
  for (int i = 0; i < spec.demand_count; ++i) {
    int j = i + rng.below(static_cast<int>(pool.size()) - i);
    std::swap(pool[i], pool[j]);
    Demand d;
    d.origin = pool[i].first;
    d.dest = pool[i].second;
    d.volume = rng.uniform(spec.volume.lo, spec.volume.hi);
    inst.demands.push_back(d);
  }

  const double density_by_mode[3] = {spec.road_density, spec.rail_density, spec.air_density};
  for (int attempt = 0; attempt < 64; ++attempt) {
    inst.arcs.clear();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = 0; v < n; ++v) {
        if (u == v) continue;
        TransportMode mode = detail::mode_between(inst.nodes[u], inst.nodes[v]);
        if (!rng.chance(density_by_mode[static_cast<int>(mode)])) continue;
        ServiceArc a;
        a.from = u;
        a.to = v;
        a.travel_time = rng.uniform(spec.travel_time.lo, spec.travel_time.hi);
        a.unit_trip_cost = rng.uniform(spec.trip_cost.lo, spec.trip_cost.hi);
        a.carrier_size = rng.uniform(spec.carrier_size.lo, spec.carrier_size.hi);
        a.mode = mode;
        inst.arcs.push_back(a);
      }
    }

    InstanceIndex idx(inst);
    std::vector<char> no_block(inst.nodes.size(), 0);
    std::vector<std::vector<NodeId>> paths;
    bool all_reachable = true;
    for (const Demand& d : inst.demands) {
      std::vector<NodeId> path =
          detail::bfs_path(idx, d.origin, d.dest, no_block, spec.max_transfers);
      if (path.size() < 2) {
        all_reachable = false;
        break;
      }
      paths.push_back(std::move(path));
    }
    if (!all_reachable) continue;

    // Deadlines priced off the fewest-hop chain with its worst-case waiting
    // (service flow no smaller than the demand's own volume).
    for (std::size_t i = 0; i < inst.demands.size(); ++i) {
      Demand& d = inst.demands[i];
      if (rng.chance(spec.unbounded_deadline_fraction)) {
        d.deadline = kUnbounded;
        continue;
      }
      const std::vector<NodeId>& path = paths[i];
      double estimate = 0.0;
      for (std::size_t m = 0; m + 1 < path.size(); ++m)
        estimate += idx.arc(path[m], path[m + 1])->travel_time;
      for (std::size_t m = 1; m + 1 < path.size(); ++m) {
        const Node& k = inst.nodes[path[m]];
        estimate += k.op_time +
                    k.accum_param * idx.arc(path[m], path[m + 1])->carrier_size / d.volume;
      }
      d.deadline = spec.deadline_tightness * estimate;
    }
    return inst;
  }
  throw GenerationFailure("no arc draw connected every demand; raise densities or counts");
}

inline std::string serialize_generator_spec(const GeneratorSpec& spec) {
  using detail::json;
  json j;
  j["schema_version"] = "1";
  j["seed"] = spec.seed;
  j["local_centers"] = spec.local_centers;
  j["sorting_centers"] = spec.sorting_centers;
  j["airports"] = spec.airports;
  j["rail_stations"] = spec.rail_stations;
  j["terminals"] = spec.terminals;
  j["road_density"] = spec.road_density;
  j["rail_density"] = spec.rail_density;
  j["air_density"] = spec.air_density;
  j["demand_count"] = spec.demand_count;
  j["time_value"] = spec.time_value;
  auto range = [](const Range& r) { return json{{"lo", r.lo}, {"hi", r.hi}}; };
  j["travel_time"] = range(spec.travel_time);
  j["trip_cost"] = range(spec.trip_cost);
  j["carrier_size"] = range(spec.carrier_size);
  j["accum_param"] = range(spec.accum_param);
  j["op_time"] = range(spec.op_time);
  j["op_cost"] = range(spec.op_cost);
  j["transfer_capacity"] = range(spec.transfer_capacity);
  j["volume"] = range(spec.volume);
  j["deadline_tightness"] = spec.deadline_tightness;
  j["unbounded_deadline_fraction"] = spec.unbounded_deadline_fraction;
  j["max_transfers"] = spec.max_transfers;
  return detail::dump(j);
}

inline GeneratorSpec parse_generator_spec(const std::string& text) {
  using detail::json;
  json j = detail::parse_text(text);
  detail::expect_object(j, "generator");
  detail::check_fields(
      j, "generator",
      {"schema_version", "seed", "local_centers", "sorting_centers", "airports",
       "rail_stations", "terminals", "road_density", "rail_density", "air_density",
       "demand_count", "time_value", "travel_time", "trip_cost", "carrier_size",
       "accum_param", "op_time", "op_cost", "transfer_capacity", "volume",
       "deadline_tightness", "unbounded_deadline_fraction", "max_transfers"});
  detail::check_schema_version(j, "generator");
  GeneratorSpec spec;
  auto num = [&](const char* key, double fallback) {
    return j.contains(key) ? detail::as_number(j[key], std::string("generator.") + key)
                           : fallback;
  };
  auto integer = [&](const char* key, int fallback) {
    return j.contains(key) ? detail::as_int(j[key], std::string("generator.") + key) : fallback;
  };
  auto range = [&](const char* key, Range fallback) {
    if (!j.contains(key)) return fallback;
    std::string where = std::string("generator.") + key;
    detail::expect_object(j[key], where);
    detail::check_fields(j[key], where, {"lo", "hi"});
    return Range{detail::as_number(detail::require(j[key], where, "lo"), where + ".lo"),
                 detail::as_number(detail::require(j[key], where, "hi"), where + ".hi")};
  };
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ParseError(0, "generator.seed", "expected an integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  spec.local_centers = integer("local_centers", spec.local_centers);
  spec.sorting_centers = integer("sorting_centers", spec.sorting_centers);
  spec.airports = integer("airports", spec.airports);
  spec.rail_stations = integer("rail_stations", spec.rail_stations);
  spec.terminals = integer("terminals", spec.terminals);
  spec.road_density = num("road_density", spec.road_density);
  spec.rail_density = num("rail_density", spec.rail_density);
  spec.air_density = num("air_density", spec.air_density);
  spec.demand_count = integer("demand_count", spec.demand_count);
  spec.time_value = num("time_value", spec.time_value);
  spec.travel_time = range("travel_time", spec.travel_time);
  spec.trip_cost = range("trip_cost", spec.trip_cost);
  spec.carrier_size = range("carrier_size", spec.carrier_size);
  spec.accum_param = range("accum_param", spec.accum_param);
  spec.op_time = range("op_time", spec.op_time);
  spec.op_cost = range("op_cost", spec.op_cost);
  spec.transfer_capacity = range("transfer_capacity", spec.transfer_capacity);
  spec.volume = range("volume", spec.volume);
  spec.deadline_tightness = num("deadline_tightness", spec.deadline_tightness);
  spec.unbounded_deadline_fraction =
      num("unbounded_deadline_fraction", spec.unbounded_deadline_fraction);
  spec.max_transfers = integer("max_transfers", spec.max_transfers);
  return spec;
}

}  // namespace netopt
