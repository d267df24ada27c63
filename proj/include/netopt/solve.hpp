#pragma once
// Solvers over the next-hop decision space: an exact enumerator for desk-scale
// instances and a seeded simulated-annealing heuristic with consistency repair
// for everything else. Both are deterministic functions of (instance, config),
// regardless of worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "netopt/evaluate.hpp"
#include "netopt/flow.hpp"
#include "netopt/model.hpp"
#include "netopt/rng.hpp"
#include "netopt/validate.hpp"

namespace netopt {

enum class Algorithm { Exact, Anneal };

struct AnnealParams {
  double initial_temp = 0.0;  // <= 0: 10% of the initial objective
  double cooling = 0.97;      // multiplicative, strictly inside (0, 1)
  int iters_per_temp = 200;
  double min_temp = 0.0;  // <= 0: 1e-4 * initial_temp
  int restarts = 1;       // independent seeded chains; best result wins
};

struct PenaltyWeights {
  double capacity = 100.0;  // per overloaded unit/day
  double deadline = 100.0;  // per late hour
  double cycle = 1000.0;    // reserved; cyclic moves are rejected outright
};

struct SolveConfig {
  Algorithm algorithm = Algorithm::Exact;
  std::uint64_t seed = 0;
  int max_transfers = 4;
  AnnealParams anneal;
  PenaltyWeights penalty;
  double exact_cap = 1e7;  // refuse exact search above this choice-product estimate
};

struct TracePoint {
  std::int64_t iteration = 0;
  double objective = 0.0;

  bool operator==(const TracePoint&) const = default;
};

struct SolveTrace {
  std::int64_t iterations = 0;
  std::vector<TracePoint> best_objective_by_iteration;
  double wall_time_seconds = 0.0;  // diagnostic only, never serialized
};

struct SolveResult {
  RoutingTable routing;
  EvaluationReport report;
  SolveTrace trace;
  bool proven_optimal = false;
};

struct InfeasibleError : Error {
  using Error::Error;
};

struct SearchSpaceTooLargeError : Error {
  double estimate;
  explicit SearchSpaceTooLargeError(double est)
      : Error("exact search space estimate " + std::to_string(est) +
              " exceeds the configured cap"),
        estimate(est) {}
};

struct RepairFailure : Error {
  using Error::Error;
};

namespace detail {

inline int worker_count() {
  if (const char* env = std::getenv("NETOPT_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Admissible next hops for the pair (i, j): the destination itself when a
// direct arc exists, then every candidate transfer reachable by an arc,
// ascending.
inline std::vector<NodeId> next_hop_options(const InstanceIndex& idx, NodeId i, NodeId j) {
  std::vector<NodeId> opts;
  if (idx.arc_pos(i, j) >= 0) opts.push_back(j);
  for (const auto& [to, arc] : idx.out(i))
    if (to != j && is_candidate_transfer(idx.instance(), i, j, to)) opts.push_back(to);
  return opts;
}

}  // namespace detail

// Restores the transfer/direct correlation: whenever next_hop(i,j) = k but
// next_hop(i,k) is not the direct decision, force next_hop(i,k) = k when the
// arc exists, otherwise reroute (i,j) to the direct service or the smallest
// workable candidate. Finishes by dropping decisions no flow uses.
inline RoutingTable repair_consistency(const Instance& inst, RoutingTable rt) {
  InstanceIndex idx(inst);
  const int sweep_limit = static_cast<int>(rt.next_hop.size()) + 2;
  bool changed = true;
  for (int sweep = 0; changed && sweep < sweep_limit; ++sweep) {
    changed = false;
    std::vector<NodePair> pairs;
    pairs.reserve(rt.next_hop.size());
    for (const auto& [pair, hop] : rt.next_hop) pairs.push_back(pair);
    for (const NodePair& pair : pairs) {
      auto hop = rt.next(pair.first, pair.second);
      if (!hop || *hop == pair.second) continue;
      NodeId k = *hop;
      auto companion = rt.next(pair.first, k);
      if (companion && *companion == k) continue;
      if (idx.arc_pos(pair.first, k) >= 0) {
        rt.set(pair.first, k, k);
        changed = true;
        continue;
      }
      // The chosen transfer has no direct service at all; reroute this pair.
      if (idx.arc_pos(pair.first, pair.second) >= 0) {
        rt.set(pair.first, pair.second, pair.second);
        changed = true;
        continue;
      }
      bool rerouted = false;
      for (NodeId k2 : candidate_transfers_for(inst, pair.first, pair.second)) {
        if (k2 == k || idx.arc_pos(pair.first, k2) < 0) continue;
        rt.set(pair.first, pair.second, k2);
        rt.set(pair.first, k2, k2);
        rerouted = true;
        changed = true;
        break;
      }
      if (!rerouted)
        throw RepairFailure("pair " + std::to_string(pair.first) + "->" +
                            std::to_string(pair.second) +
                            " has no admissible next hop to repair to");
    }
  }

  // Trim to the decisions flow actually uses (tolerant of incomplete or
  // cyclic chains; those surface later in validation).
  std::set<NodePair> visited;
  std::set<NodePair> served;
  for (const auto& [dest, origins] : idx.demands_by_dest()) {
    for (const auto& [origin, volume] : origins) {
      NodeId cur = origin;
      std::size_t steps = 0;
      while (cur != dest && steps++ <= inst.nodes.size()) {
        auto next = rt.next(cur, dest);
        if (!next) break;
        if (!visited.insert({cur, dest}).second) break;
        served.insert({cur, *next});
        cur = *next;
      }
    }
  }
  RoutingTable trimmed;
  for (const auto& [pair, hop] : rt.next_hop) {
    if (visited.count(pair) || (hop == pair.second && served.count(pair)))
      trimmed.next_hop.emplace(pair, hop);
  }
  return trimmed;
}

namespace detail {

struct ExactSearch {
  const InstanceIndex& idx;
  const SolveConfig& cfg;
  EvalScratch scratch;
  RoutingTable table;
  std::set<NodePair> pending;
  std::map<NodePair, std::vector<NodeId>> option_cache;

  bool have_best = false;
  double best_objective = 0.0;
  RoutingTable best_table;
  std::int64_t leaves = 0;
  std::vector<TracePoint> improvements;

  explicit ExactSearch(const InstanceIndex& idx_, const SolveConfig& cfg_)
      : idx(idx_), cfg(cfg_) {}

  const std::vector<NodeId>& options(const NodePair& pair) {
    auto it = option_cache.find(pair);
    if (it == option_cache.end())
      it = option_cache.emplace(pair, next_hop_options(idx, pair.first, pair.second)).first;
    return it->second;
  }

  // Product of per-pair option counts over every pair flow could reach.
  double estimate_search_space() {
    std::set<NodePair> closure;
    std::vector<NodePair> queue;
    for (const Demand& d : idx.demands_sorted())
      if (closure.insert({d.origin, d.dest}).second) queue.push_back({d.origin, d.dest});
    long double est = 1.0L;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodePair pair = queue[head];
      const auto& opts = options(pair);
      est *= static_cast<long double>(std::max<std::size_t>(opts.size(), 1));
      if (est > 1e30L) est = 1e30L;
      for (NodeId k : opts) {
        if (k == pair.second) continue;
        NodePair next{k, pair.second};
        if (closure.insert(next).second) queue.push_back(next);
      }
    }
    return static_cast<double>(est);
  }

  bool closes_cycle(NodeId from, const NodePair& pair) const {
    NodeId cur = from;
    while (cur != pair.second) {
      if (cur == pair.first) return true;
      auto next = table.next(cur, pair.second);
      if (!next) return false;
      cur = *next;
    }
    return false;
  }

  void leaf() {
    ++leaves;
    CoreCosts costs = run_costs(idx, table, scratch, nullptr);
    if (!costs.feasible) return;
    double obj = costs.objective();
    if (!have_best || obj < best_objective ||
        (obj == best_objective && table < best_table)) {
      if (!have_best || obj < best_objective)
        improvements.push_back({leaves, obj});
      have_best = true;
      best_objective = obj;
      best_table = table;
    }
  }

  void search() {
    if (pending.empty()) {
      leaf();
      return;
    }
    NodePair pair = *pending.begin();
    pending.erase(pending.begin());
    for (NodeId choice : options(pair)) {
      if (choice != pair.second && closes_cycle(choice, pair)) continue;

      bool viable = true;
      bool forced_companion = false;
      bool unqueued_companion = false;
      bool queued_successor = false;
      if (choice != pair.second) {
        NodePair companion{pair.first, choice};
        auto existing = table.next(companion.first, companion.second);
        if (existing) {
          viable = *existing == choice;  // already fixed as a transfer: conflict
        } else {
          if (pending.erase(companion)) unqueued_companion = true;
          table.set(companion.first, companion.second, choice);
          forced_companion = true;
        }
        NodePair successor{choice, pair.second};
        if (viable && !table.next(successor.first, successor.second) &&
            !pending.count(successor)) {
          pending.insert(successor);
          queued_successor = true;
        }
      }
      if (viable) {
        table.set(pair.first, pair.second, choice);
        search();
        table.next_hop.erase(pair);
      }
      if (queued_successor) pending.erase({choice, pair.second});
      if (forced_companion) table.next_hop.erase({pair.first, choice});
      if (unqueued_companion) pending.insert({pair.first, choice});
    }
    pending.insert(pair);
  }
};

}  // namespace detail

// Exhaustive search over consistent next-hop assignments. Returns the
// feasible minimum with ties broken toward the lexicographically smallest
// table. Refuses oversized searches with an estimate instead of running them.
inline SolveResult solve_exact(const Instance& inst, const SolveConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  InstanceIndex idx(inst);
  detail::ExactSearch search(idx, cfg);
  double estimate = search.estimate_search_space();
  if (estimate > cfg.exact_cap) throw SearchSpaceTooLargeError(estimate);

  for (const Demand& d : idx.demands_sorted()) search.pending.insert({d.origin, d.dest});
  search.search();
  if (!search.have_best)
    throw InfeasibleError("no routing satisfies the capacity and deadline constraints");

  SolveResult result;
  result.routing = search.best_table;
  result.report = evaluate(inst, search.best_table);
  result.trace.iterations = search.leaves;
  result.trace.best_objective_by_iteration = std::move(search.improvements);
  result.trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.proven_optimal = true;
  return result;
}

namespace detail {

// All-direct start; demands without a direct arc get the fewest-hop chain.
inline RoutingTable initial_solution(const InstanceIndex& idx, int max_transfers) {
  const Instance& inst = idx.instance();
  RoutingTable rt;
  std::vector<char> no_block(inst.nodes.size(), 0);
  for (const Demand& d : idx.demands_sorted()) {
    NodeId cur = d.origin;
    while (cur != d.dest) {
      if (auto next = rt.next(cur, d.dest)) {
        cur = *next;
        continue;
      }
      if (idx.arc_pos(cur, d.dest) >= 0) {
        rt.set(cur, d.dest, d.dest);
        cur = d.dest;
        continue;
      }
      std::vector<NodeId> path = bfs_path(idx, cur, d.dest, no_block, max_transfers);
      if (path.size() < 2)
        throw InfeasibleError("demand " + std::to_string(d.origin) + "->" +
                              std::to_string(d.dest) +
                              " cannot reach its destination on this network");
      NodeId hop = path[1];
      rt.set(cur, d.dest, hop);
      rt.set(cur, hop, hop);
      cur = hop;
    }
  }
  return canonical_routing(idx, rt);
}

// Re-points (i,j) to `choice` and rebuilds the downstream chain, forcing
// direct companions as it goes. Returns false (table possibly dirty, caller
// restores) when the move would cycle or strand the flow.
inline bool apply_move(const InstanceIndex& idx, RoutingTable& table, const NodePair& pair,
                       NodeId choice, int max_transfers) {
  table.set(pair.first, pair.second, choice);
  if (choice == pair.second) return true;

  auto companion = table.next(pair.first, choice);
  if (!companion || *companion != choice) table.set(pair.first, choice, choice);

  std::vector<char> visited(idx.instance().nodes.size(), 0);
  visited[pair.first] = 1;
  NodeId cur = choice;
  while (cur != pair.second) {
    if (visited[cur]) return false;
    visited[cur] = 1;
    if (auto next = table.next(cur, pair.second)) {
      cur = *next;
      continue;
    }
    if (idx.arc_pos(cur, pair.second) >= 0) {
      table.set(cur, pair.second, pair.second);
      cur = pair.second;
      continue;
    }
    std::vector<NodeId> path = bfs_path(idx, cur, pair.second, visited, max_transfers);
    if (path.size() < 2) return false;
    NodeId hop = path[1];
    table.set(cur, pair.second, hop);
    auto hop_companion = table.next(cur, hop);
    if (!hop_companion || *hop_companion != hop) table.set(cur, hop, hop);
    cur = hop;
  }
  return true;
}

struct RestartOutcome {
  bool found_feasible = false;
  double best_objective = 0.0;
  RoutingTable best_table;
  double best_energy = 0.0;
  RoutingTable best_energy_table;
  std::vector<TracePoint> improvements;  // vs this restart's own feasible best
};

struct AnnealPlan {
  double initial_temp = 0.0;
  double min_temp = 0.0;
  int levels = 0;
  std::int64_t iters_per_restart = 0;
};

inline AnnealPlan plan_anneal(const SolveConfig& cfg, double initial_objective) {
  AnnealPlan plan;
  plan.initial_temp = cfg.anneal.initial_temp > 0.0 ? cfg.anneal.initial_temp
                                                    : 0.1 * initial_objective;
  if (!(plan.initial_temp > 0.0)) plan.initial_temp = 1.0;
  plan.min_temp =
      cfg.anneal.min_temp > 0.0 ? cfg.anneal.min_temp : 1e-4 * plan.initial_temp;
  for (double t = plan.initial_temp; t >= plan.min_temp; t *= cfg.anneal.cooling)
    ++plan.levels;
  plan.iters_per_restart =
      static_cast<std::int64_t>(plan.levels) * cfg.anneal.iters_per_temp;
  return plan;
}

inline RestartOutcome run_restart(const InstanceIndex& idx, const SolveConfig& cfg,
                                  const AnnealPlan& plan, const RoutingTable& initial,
                                  int restart) {
  const Instance& inst = idx.instance();
  Rng rng(splitmix64(cfg.seed ^ (0x9E3779B97F4A7C15ull * (restart + 1))));
  EvalScratch scratch;
  std::map<NodePair, std::vector<NodeId>> option_cache;
  auto options = [&](const NodePair& pair) -> const std::vector<NodeId>& {
    auto it = option_cache.find(pair);
    if (it == option_cache.end())
      it = option_cache.emplace(pair, next_hop_options(idx, pair.first, pair.second)).first;
    return it->second;
  };
  auto energy = [&](const CoreCosts& costs) {
    return costs.objective() + cfg.penalty.capacity * costs.capacity_deficit +
           cfg.penalty.deadline * costs.deadline_deficit;
  };

  RoutingTable table = initial;
  CoreCosts costs = run_costs(idx, table, scratch, nullptr);
  double current_energy = energy(costs);
  std::vector<NodePair> movable = scratch.support;

  RestartOutcome out;
  out.best_energy = current_energy;
  out.best_energy_table = table;
  if (costs.feasible) {
    out.found_feasible = true;
    out.best_objective = costs.objective();
    out.best_table = table;
    out.improvements.push_back({0, out.best_objective});
  }
  if (movable.empty()) return out;

  std::int64_t iter = 0;
  double temp = plan.initial_temp;
  for (int level = 0; level < plan.levels; ++level, temp *= cfg.anneal.cooling) {
    for (int i = 0; i < cfg.anneal.iters_per_temp; ++i) {
      ++iter;
      NodePair pair = movable[rng.below(static_cast<int>(movable.size()))];
      NodeId current_hop = *table.next(pair.first, pair.second);
      const auto& all_opts = options(pair);
      // draw among alternatives, skipping the current hop
      int alternatives = static_cast<int>(all_opts.size()) -
                         (std::find(all_opts.begin(), all_opts.end(), current_hop) !=
                                  all_opts.end()
                              ? 1
                              : 0);
      if (alternatives <= 0) continue;
      int pick = rng.below(alternatives);
      NodeId choice = kInvalidNode;
      for (NodeId c : all_opts) {
        if (c == current_hop) continue;
        if (pick-- == 0) {
          choice = c;
          break;
        }
      }

      RoutingTable snapshot = table;
      if (!apply_move(idx, table, pair, choice, cfg.max_transfers)) {
        table = std::move(snapshot);
        continue;
      }
      table = canonical_routing(idx, table);
      CoreCosts cand = run_costs(idx, table, scratch, nullptr);
      double cand_energy = energy(cand);
      bool accept = cand_energy <= current_energy ||
                    rng.unit() < std::exp((current_energy - cand_energy) / temp);
      if (!accept) {
        table = std::move(snapshot);
        continue;
      }
      current_energy = cand_energy;
      movable = scratch.support;
      if (cand_energy < out.best_energy ||
          (cand_energy == out.best_energy && table < out.best_energy_table)) {
        out.best_energy = cand_energy;
        out.best_energy_table = table;
      }
      if (cand.feasible) {
        double obj = cand.objective();
        if (!out.found_feasible || obj < out.best_objective ||
            (obj == out.best_objective && table < out.best_table)) {
          if (!out.found_feasible || obj < out.best_objective)
            out.improvements.push_back({iter, obj});
          out.found_feasible = true;
          out.best_objective = obj;
          out.best_table = table;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Simulated annealing from the repaired all-direct start. Neighborhood moves
// re-point one pair and rebuild its chain; inconsistent intermediates are
// repaired on the fly and cyclic moves rejected. Capacity and deadline
// violations enter the acceptance energy through the penalty weights, but the
// returned result is only marked feasible when it truly is. Restarts run in
// parallel (capped by NETOPT_THREADS) without affecting the outcome.
inline SolveResult solve_anneal(const Instance& inst, const SolveConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  InstanceIndex idx(inst);
  RoutingTable initial = detail::initial_solution(idx, cfg.max_transfers);
  detail::EvalScratch scratch;
  detail::CoreCosts initial_costs = detail::run_costs(idx, initial, scratch, nullptr);
  detail::AnnealPlan plan = detail::plan_anneal(cfg, initial_costs.objective());

  const int restarts = std::max(cfg.anneal.restarts, 1);
  std::vector<detail::RestartOutcome> outcomes(restarts);
  int workers = std::min(detail::worker_count(), restarts);
  if (workers <= 1) {
    for (int r = 0; r < restarts; ++r)
      outcomes[r] = detail::run_restart(idx, cfg, plan, initial, r);
  } else {
    std::atomic<int> next_restart{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int r = next_restart.fetch_add(1); r < restarts; r = next_restart.fetch_add(1))
          outcomes[r] = detail::run_restart(idx, cfg, plan, initial, r);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  // Deterministic merge in restart order. The recorded improvements are each
  // restart's feasible-best trajectory; keep the globally improving ones.
  SolveResult result;
  bool found_feasible = false;
  double best_objective = 0.0;
  for (int r = 0; r < restarts; ++r) {
    for (const TracePoint& p : outcomes[r].improvements) {
      if (!found_feasible || p.objective < best_objective) {
        result.trace.best_objective_by_iteration.push_back(
            {r * plan.iters_per_restart + p.iteration, p.objective});
        best_objective = p.objective;
        found_feasible = true;
      }
    }
  }
  if (found_feasible) {
    bool picked = false;
    for (const detail::RestartOutcome& out : outcomes) {
      if (!out.found_feasible || out.best_objective != best_objective) continue;
      if (!picked || out.best_table < result.routing) {
        result.routing = out.best_table;
        picked = true;
      }
    }
  } else {
    bool picked = false;
    double best_energy = 0.0;
    for (const detail::RestartOutcome& out : outcomes) {
      if (!picked || out.best_energy < best_energy ||
          (out.best_energy == best_energy && out.best_energy_table < result.routing)) {
        best_energy = out.best_energy;
        result.routing = out.best_energy_table;
        picked = true;
      }
    }
  }

  result.report = evaluate(inst, result.routing);
  result.trace.iterations = static_cast<std::int64_t>(restarts) * plan.iters_per_restart;
  result.trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.proven_optimal = false;
  return result;
}

inline SolveResult solve(const Instance& inst, const SolveConfig& cfg) {
  return cfg.algorithm == Algorithm::Exact ? solve_exact(inst, cfg) : solve_anneal(inst, cfg);
}

}  // namespace netopt
