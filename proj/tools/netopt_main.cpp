// Command line front end: solve, evaluate, validate, generate and export
// subcommands over the instance/solution/report file formats.
//
// Exit codes: 0 success, 1 infeasible or no solution, 2 input error,
// 3 internal limit (for example an oversized exact search).

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "netopt/netopt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr int kExitLimit = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw netopt::Error("cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw netopt::Error("cannot write \"" + path + "\"");
  out << content;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void print_report_summary(const netopt::Instance& inst, const netopt::EvaluationReport& report) {
  std::cout << "objective            " << fmt(report.objective) << "\n";
  std::cout << "  accumulation cost  " << fmt(report.accumulation_cost) << "\n";
  std::cout << "  transport cost     " << fmt(report.transport_cost) << "\n";
  std::cout << "  transfer time cost " << fmt(report.transfer_time_cost) << "\n";
  std::cout << "  transfer op cost   " << fmt(report.transfer_op_cost) << "\n";
  std::cout << "feasible             " << (report.feasible ? "yes" : "no") << "\n";
  for (const auto& [node, nr] : report.per_node) {
    if (nr.capacity_slack < 0.0)
      std::cout << "  capacity violated at " << netopt::display_name(inst, node) << ": slack "
                << fmt(nr.capacity_slack) << " units/day\n";
  }
  for (const auto& [pair, dr] : report.per_demand) {
    if (dr.deadline_slack_hours < 0.0)
      std::cout << "  deadline violated for " << netopt::display_name(inst, pair.first) << " -> "
                << netopt::display_name(inst, pair.second) << ": slack "
                << fmt(dr.deadline_slack_hours) << " h\n";
  }
}

void print_violations(const std::vector<netopt::Violation>& violations) {
  for (const netopt::Violation& v : violations) {
    std::cout << (v.severity == netopt::Severity::Error ? "error" : "warning") << " ["
              << netopt::to_string(v.rule) << "] " << v.entity << ": " << v.message << "\n";
  }
}

netopt::Instance load_instance(const std::string& path) {
  return netopt::parse_instance(read_file(path));
}

struct SolveFlags {
  std::string instance_path;
  std::string algo = "exact";
  std::string out_path;
  netopt::SolveConfig cfg;
};

int cmd_solve(const SolveFlags& flags) {
  netopt::Instance inst = load_instance(flags.instance_path);
  netopt::SolveConfig cfg = flags.cfg;
  cfg.algorithm = flags.algo == "anneal" ? netopt::Algorithm::Anneal : netopt::Algorithm::Exact;
  netopt::SolveResult result = netopt::solve(inst, cfg);
  if (!flags.out_path.empty())
    write_file(flags.out_path, netopt::serialize_result(result, cfg));
  std::cout << "algorithm            " << flags.algo << "\n";
  std::cout << "proven optimal       " << (result.proven_optimal ? "yes" : "no") << "\n";
  std::cout << "iterations           " << result.trace.iterations << "\n";
  print_report_summary(inst, result.report);
  std::cerr << "wall time " << result.trace.wall_time_seconds << " s\n";
  return result.report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_evaluate(const std::string& instance_path, const std::string& solution_path) {
  netopt::Instance inst = load_instance(instance_path);
  netopt::RoutingTable rt = netopt::parse_solution(read_file(solution_path));
  std::vector<netopt::Violation> violations = netopt::validate_solution(inst, rt);
  if (!violations.empty()) {
    print_violations(violations);
    return kExitInputError;
  }
  netopt::EvaluationReport report = netopt::evaluate(inst, rt);
  std::cout << netopt::serialize_report(report);
  print_report_summary(inst, report);
  return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
  netopt::Instance inst = load_instance(instance_path);  // throws on hard violations
  std::vector<netopt::Violation> violations = netopt::validate_instance(inst);
  if (!solution_path.empty()) {
    netopt::RoutingTable rt = netopt::parse_solution(read_file(solution_path));
    std::vector<netopt::Violation> sv = netopt::validate_solution(inst, rt);
    violations.insert(violations.end(), sv.begin(), sv.end());
  }
  print_violations(violations);
  if (netopt::has_errors(violations)) return kExitInputError;
  std::cout << "ok\n";
  return kExitOk;
}

int cmd_generate(const netopt::GeneratorSpec& base, const std::string& spec_path,
                 const std::string& out_path) {
  netopt::GeneratorSpec spec = base;
  if (!spec_path.empty()) spec = netopt::parse_generator_spec(read_file(spec_path));
  netopt::Instance inst = netopt::generate(spec);
  std::string text = netopt::serialize_instance(inst);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return kExitOk;
}

int cmd_export(const std::string& instance_path, const std::string& solution_path,
               const std::string& out_path) {
  netopt::Instance inst = load_instance(instance_path);
  std::string dot;
  if (solution_path.empty()) {
    dot = netopt::export_graph(inst);
  } else {
    netopt::RoutingTable rt = netopt::parse_solution(read_file(solution_path));
    std::vector<netopt::Violation> violations = netopt::validate_solution(inst, rt);
    if (!violations.empty()) {
      print_violations(violations);
      return kExitInputError;
    }
    netopt::EvaluationReport report = netopt::evaluate(inst, rt);
    dot = netopt::export_graph(inst, &rt, &report);
  }
  if (out_path.empty())
    std::cout << dot;
  else
    write_file(out_path, dot);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Courier transportation network design"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "Find a low-cost feasible routing");
  solve->add_option("instance", solve_flags.instance_path, "Instance file")->required();
  solve->add_option("--algo", solve_flags.algo, "Algorithm: exact or anneal")
      ->check(CLI::IsMember({"exact", "anneal"}))
      ->capture_default_str();
  solve->add_option("--seed", solve_flags.cfg.seed, "Random seed")->capture_default_str();
  solve->add_option("--out", solve_flags.out_path, "Write the solve result here");
  solve->add_option("--max-transfers", solve_flags.cfg.max_transfers,
                    "Chain length budget for repair paths")
      ->capture_default_str();
  solve->add_option("--exact-cap", solve_flags.cfg.exact_cap,
                    "Refuse exact search above this size estimate")
      ->capture_default_str();
  solve->add_option("--initial-temp", solve_flags.cfg.anneal.initial_temp,
                    "Annealing start temperature (0: 10% of initial objective)");
  solve->add_option("--cooling", solve_flags.cfg.anneal.cooling, "Cooling factor in (0,1)")
      ->capture_default_str();
  solve->add_option("--iters-per-temp", solve_flags.cfg.anneal.iters_per_temp,
                    "Moves per temperature level")
      ->capture_default_str();
  solve->add_option("--min-temp", solve_flags.cfg.anneal.min_temp,
                    "Stop temperature (0: 1e-4 of the start)");
  solve->add_option("--restarts", solve_flags.cfg.anneal.restarts,
                    "Independent annealing restarts")
      ->capture_default_str();
  solve->add_option("--capacity-weight", solve_flags.cfg.penalty.capacity,
                    "Penalty per overloaded unit/day")
      ->capture_default_str();
  solve->add_option("--deadline-weight", solve_flags.cfg.penalty.deadline,
                    "Penalty per late hour")
      ->capture_default_str();

  std::string eval_instance, eval_solution;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Price an existing solution");
  evaluate->add_option("instance", eval_instance, "Instance file")->required();
  evaluate->add_option("solution", eval_solution, "Solution file")->required();

  std::string val_instance, val_solution;
  CLI::App* validate = app.add_subcommand("validate", "Check an instance (and solution)");
  validate->add_option("instance", val_instance, "Instance file")->required();
  validate->add_option("--solution", val_solution, "Solution file to check too");

  netopt::GeneratorSpec gen_spec;
  std::string gen_spec_path, gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Create a random instance");
  generate->add_option("--spec", gen_spec_path, "Generator spec file (overrides flags)");
  generate->add_option("--seed", gen_spec.seed, "Random seed")->capture_default_str();
  generate->add_option("--local-centers", gen_spec.local_centers)->capture_default_str();
  generate->add_option("--sorting-centers", gen_spec.sorting_centers)->capture_default_str();
  generate->add_option("--airports", gen_spec.airports)->capture_default_str();
  generate->add_option("--rail-stations", gen_spec.rail_stations)->capture_default_str();
  generate->add_option("--terminals", gen_spec.terminals)->capture_default_str();
  generate->add_option("--demands", gen_spec.demand_count)->capture_default_str();
  generate->add_option("--road-density", gen_spec.road_density)->capture_default_str();
  generate->add_option("--rail-density", gen_spec.rail_density)->capture_default_str();
  generate->add_option("--air-density", gen_spec.air_density)->capture_default_str();
  generate->add_option("--deadline-tightness", gen_spec.deadline_tightness)
      ->capture_default_str();
  generate->add_option("--out", gen_out, "Write the instance here (default: stdout)");

  std::string exp_instance, exp_solution, exp_out;
  CLI::App* exportc = app.add_subcommand("export", "Write a DOT graph of the network");
  exportc->add_option("instance", exp_instance, "Instance file")->required();
  exportc->add_option("--solution", exp_solution, "Solution to highlight");
  exportc->add_option("--out", exp_out, "Write the DOT file here (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (evaluate->parsed()) return cmd_evaluate(eval_instance, eval_solution);
    if (validate->parsed()) return cmd_validate(val_instance, val_solution);
    if (generate->parsed()) return cmd_generate(gen_spec, gen_spec_path, gen_out);
    if (exportc->parsed()) return cmd_export(exp_instance, exp_solution, exp_out);
  } catch (const netopt::SearchSpaceTooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLimit;
  } catch (const netopt::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const netopt::ValidationError& e) {
    print_violations(e.violations);
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const netopt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
