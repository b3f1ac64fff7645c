// Experiment CLI for the joint computation/communication cooperation solver.
//
//   meccoop solve        --config cfg [--out row.csv] [--scheme list] [--tolerance eps]
//   meccoop sweep        --config cfg [--out sweep.csv] [--scheme list] [--tolerance eps]
//   meccoop feasibility  --config cfg [--out table.csv]
//   meccoop oracle-check --config cfg [--out table.csv] [--grid spec] [--tolerance eps]
//
// Exit codes: 0 ok, 1 config error, 2 solver non-convergence on any row.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mecc/experiments.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_path;
  std::string scheme_list;
  std::string grid_spec;
  double tolerance = 0;  // 0 keeps the solver default
};

mecc::ExperimentConfig load_config(const CliOptions& opt) {
  mecc::ExperimentConfig cfg = mecc::parse_config_file(opt.config_path);
  if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
  if (!opt.scheme_list.empty()) {
    cfg.schemes.clear();
    std::stringstream ss(opt.scheme_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "local") cfg.schemes.push_back(mecc::SchemeId::local);
      else if (item == "computation_coop") cfg.schemes.push_back(mecc::SchemeId::computation_coop);
      else if (item == "communication_coop")
        cfg.schemes.push_back(mecc::SchemeId::communication_coop);
      else if (item == "joint") cfg.schemes.push_back(mecc::SchemeId::joint);
      else if (!item.empty()) throw mecc::ConfigError("unknown scheme '" + item + "'");
    }
  }
  return cfg;
}

mecc::GridSpec parse_grid_spec(const std::string& spec) {
  mecc::GridSpec g;
  if (spec.empty()) return g;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw mecc::ConfigError("bad --grid item '" + item + "'");
    const std::string key = item.substr(0, eq);
    const int value = std::stoi(item.substr(eq + 1));
    if (key == "tau") g.tau_points = value;
    else if (key == "bits") g.bit_points = value;
    else if (key == "p2") g.power_points = value;
    else if (key == "rounds") g.refine_rounds = value;
    else throw mecc::ConfigError("bad --grid key '" + key + "' (want tau,bits,p2,rounds)");
  }
  return g;
}

mecc::SolveConfig solve_config(const CliOptions& opt) {
  mecc::SolveConfig cfg;
  if (opt.tolerance > 0) {
    cfg.ellipsoid.eps_rel = opt.tolerance;
    cfg.ellipsoid.eps_abs = opt.tolerance * 1e-6;
  }
  return cfg;
}

int write_out(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return 1;
  }
  out << body;
  return 0;
}

void print_report(const mecc::Scenario& s, const mecc::SolveReport& rep) {
  using std::cout;
  cout << "scenario: T=" << s.block_length_s << " s, L=" << s.task_bits
       << " bits, B=" << s.bandwidth_hz << " Hz\n";
  cout << "supportable bits (L_max): " << rep.l_max_bits << "\n";
  switch (rep.status) {
    case mecc::SolveStatus::infeasible_task:
      cout << "status: infeasible_task (task exceeds L_max)\n";
      return;
    case mecc::SolveStatus::not_converged:
      cout << "status: not_converged\n";
      return;
    case mecc::SolveStatus::optimal:
      break;
  }
  const auto& a = rep.allocation;
  const auto& e = rep.energy;
  cout << "status: optimal\n";
  cout << "energy total: " << e.e_total_j << " J\n";
  cout << "  offload: slot1 " << e.e_offload_1_j << " J, slot2 " << e.e_offload_2_j
       << " J, slot3 " << e.e_offload_3_j << " J\n";
  cout << "  compute: user " << e.e_compute_user_j << " J, helper " << e.e_compute_helper_j
       << " J\n";
  cout << "slots: tau1 " << a.tau1_s << " s, tau2 " << a.tau2_s << " s, tau3 " << a.tau3_s
       << " s, tau4 " << a.tau4_s(s) << " s\n";
  cout << "powers: P1 " << a.p1_w << " W, P2 " << a.p2_w << " W, P3 " << a.p3_w << " W\n";
  cout << "bits: local " << a.bits_local << ", helper " << a.bits_helper << ", ap "
       << a.bits_ap << "\n";
  cout << "dual value: " << rep.dual_value_j << " J, duality gap: " << rep.duality_gap_j
       << " J, ellipsoid iterations: " << rep.ellipsoid_iterations << "\n";
}

int cmd_solve(const CliOptions& opt) {
  const mecc::ExperimentConfig cfg = load_config(opt);
  const mecc::Scenario s = mecc::build_scenario(cfg);
  const mecc::SolveReport rep = mecc::solve_joint(s, solve_config(opt));
  print_report(s, rep);
  for (mecc::SchemeId id : cfg.schemes) {
    if (id == mecc::SchemeId::joint) continue;
    mecc::SchemeResult r;
    if (id == mecc::SchemeId::local) r = mecc::local_only(s);
    if (id == mecc::SchemeId::computation_coop) r = mecc::computation_coop(s);
    if (id == mecc::SchemeId::communication_coop) r = mecc::communication_coop(s);
    std::cout << "benchmark " << mecc::scheme_name(id) << ": ";
    if (r.feasible) std::cout << r.energy_j << " J\n";
    else std::cout << "infeasible\n";
  }
  if (!opt.out_path.empty()) {
    mecc::ExperimentConfig row_cfg = cfg;
    row_cfg.sweep_variable.reset();
    const std::vector<mecc::SweepRow> rows = mecc::run_sweep(row_cfg, solve_config(opt));
    std::ostringstream body;
    mecc::write_sweep_csv(row_cfg, rows, body);
    if (write_out(opt.out_path, body.str())) return 1;
  }
  return rep.status == mecc::SolveStatus::not_converged ? 2 : 0;
}

int cmd_sweep(const CliOptions& opt) {
  const mecc::ExperimentConfig cfg = load_config(opt);
  const std::vector<mecc::SweepRow> rows = mecc::run_sweep(cfg, solve_config(opt));
  std::ostringstream body;
  mecc::write_sweep_csv(cfg, rows, body);
  const std::string path = !opt.out_path.empty() ? opt.out_path : cfg.output_path;
  if (write_out(path, body.str())) return 1;
  for (const auto& row : rows)
    if (row.joint && row.joint->status == mecc::SolveStatus::not_converged) return 2;
  return 0;
}

int cmd_feasibility(const CliOptions& opt) {
  const mecc::ExperimentConfig cfg = load_config(opt);
  const auto rows = mecc::run_feasibility(cfg);
  std::ostringstream body;
  mecc::write_feasibility_csv(cfg, rows, body);
  const std::string path = !opt.out_path.empty() ? opt.out_path : cfg.output_path;
  return write_out(path, body.str());
}

int cmd_oracle_check(const CliOptions& opt) {
  const mecc::ExperimentConfig cfg = load_config(opt);
  const mecc::GridSpec grid = parse_grid_spec(opt.grid_spec);
  const auto rows = mecc::run_oracle_check(cfg, grid, solve_config(opt));
  std::ostringstream body;
  mecc::write_oracle_check_csv(cfg, rows, body);
  const std::string path = !opt.out_path.empty() ? opt.out_path : cfg.output_path;
  if (write_out(path, body.str())) return 1;
  for (const auto& row : rows)
    if (row.joint.status == mecc::SolveStatus::not_converged) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-energy scheduling for three-node cooperative mobile edge computing"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub, bool with_scheme, bool with_grid) {
    sub->add_option("--config", opt.config_path, "experiment config file")->required();
    sub->add_option("--out", opt.out_path, "output CSV path (default: stdout or config)");
    sub->add_option("--tolerance", opt.tolerance, "relative dual convergence tolerance");
    if (with_scheme)
      sub->add_option("--scheme", opt.scheme_list, "comma list: local,computation_coop,"
                                                   "communication_coop,joint");
    if (with_grid)
      sub->add_option("--grid", opt.grid_spec, "oracle grid, e.g. tau=25,bits=40,p2=60,rounds=2");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one scenario and print the report");
  add_common(solve, true, false);
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured parameter sweep to CSV");
  add_common(sweep, true, false);
  CLI::App* feas = app.add_subcommand("feasibility", "tabulate the supportable-bits limit");
  add_common(feas, false, false);
  CLI::App* oracle = app.add_subcommand("oracle-check",
                                        "compare the solver against the brute-force reference");
  add_common(oracle, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (feas->parsed()) return cmd_feasibility(opt);
    if (oracle->parsed()) return cmd_oracle_check(opt);
  } catch (const mecc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
