#include "mecc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace mecc {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::block_length: return "T";
    case SweepVariable::task_bits: return "L";
    case SweepVariable::helper_distance: return "D";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!(helper_distance_m > 0) || !(helper_distance_m < user_ap_distance_m))
    throw ConfigError("layout: helper must sit strictly between the user and the AP");
  if (!(user_ap_distance_m > 0)) throw ConfigError("layout: user-AP distance must be positive");
  if (sweep_variable) {
    if (!(sweep_step > 0)) throw ConfigError("sweep: step must be positive");
    if (sweep_stop < sweep_start) throw ConfigError("sweep: empty range");
  }
}

namespace {

SweepVariable parse_sweep_variable(const std::string& v) {
  if (v == "T" || v == "t") return SweepVariable::block_length;
  if (v == "L" || v == "l") return SweepVariable::task_bits;
  if (v == "D" || v == "d") return SweepVariable::helper_distance;
  throw ConfigError("sweep.variable must be one of T, L, D (got '" + v + "')");
}

SchemeId parse_scheme(const std::string& v) {
  if (v == "local") return SchemeId::local;
  if (v == "computation_coop") return SchemeId::computation_coop;
  if (v == "communication_coop") return SchemeId::communication_coop;
  if (v == "joint") return SchemeId::joint;
  throw ConfigError("unknown scheme '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("");
    return x;
  } catch (...) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, bool> seen;
  std::string line;
  int lineno = 0;
  bool schemes_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (seen[key]) throw ConfigError("config: duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "layout.user_ap_distance_m") cfg.user_ap_distance_m = parse_number(key, value);
    else if (key == "layout.helper_distance_m") cfg.helper_distance_m = parse_number(key, value);
    else if (key == "pathloss.beta0_db") cfg.beta0_db = parse_number(key, value);
    else if (key == "pathloss.d0_m") cfg.d0_m = parse_number(key, value);
    else if (key == "pathloss.exponent") cfg.exponent = parse_number(key, value);
    else if (key == "radio.bandwidth_mhz") cfg.bandwidth_mhz = parse_number(key, value);
    else if (key == "radio.noise_dbm") cfg.noise_dbm = parse_number(key, value);
    else if (key == "radio.capacity_gap") cfg.capacity_gap = parse_number(key, value);
    else if (key == "device.p_user_max_dbm") cfg.p_user_max_dbm = parse_number(key, value);
    else if (key == "device.p_helper_max_dbm") cfg.p_helper_max_dbm = parse_number(key, value);
    else if (key == "device.kappa_user") cfg.kappa_user = parse_number(key, value);
    else if (key == "device.kappa_helper") cfg.kappa_helper = parse_number(key, value);
    else if (key == "device.cycles_per_bit_user") cfg.cycles_per_bit_user = parse_number(key, value);
    else if (key == "device.cycles_per_bit_helper")
      cfg.cycles_per_bit_helper = parse_number(key, value);
    else if (key == "device.f_user_max_ghz") cfg.f_user_max_ghz = parse_number(key, value);
    else if (key == "device.f_helper_max_ghz") cfg.f_helper_max_ghz = parse_number(key, value);
    else if (key == "device.f_ap_max_ghz") cfg.f_ap_max_ghz = parse_number(key, value);
    else if (key == "task.block_length_s") cfg.block_length_s = parse_number(key, value);
    else if (key == "task.bits_mbit") cfg.task_mbit = parse_number(key, value);
    else if (key == "sweep.variable") cfg.sweep_variable = parse_sweep_variable(value);
    else if (key == "sweep.start") cfg.sweep_start = parse_number(key, value);
    else if (key == "sweep.stop") cfg.sweep_stop = parse_number(key, value);
    else if (key == "sweep.step") cfg.sweep_step = parse_number(key, value);
    else if (key == "schemes.communication_coop_full_block") {
      if (value == "true" || value == "1") cfg.communication_coop_full_block = true;
      else if (value == "false" || value == "0") cfg.communication_coop_full_block = false;
      else throw ConfigError("config key '" + key + "': expected true or false");
    }
    else if (key == "output.path") cfg.output_path = value;
    else if (key == "seed") cfg.seed = static_cast<unsigned long long>(parse_number(key, value));
    else if (key == "schemes") {
      schemes_set = true;
      cfg.schemes.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.schemes.push_back(parse_scheme(item));
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  (void)schemes_set;
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

Scenario build_scenario(const ExperimentConfig& cfg, double sweep_value) {
  cfg.validate();
  double T = cfg.block_length_s;
  double l_mbit = cfg.task_mbit;
  double d = cfg.helper_distance_m;
  if (cfg.sweep_variable) {
    switch (*cfg.sweep_variable) {
      case SweepVariable::block_length: T = sweep_value; break;
      case SweepVariable::task_bits: l_mbit = sweep_value; break;
      case SweepVariable::helper_distance: d = sweep_value; break;
    }
  }
  if (!(d > 0) || !(d < cfg.user_ap_distance_m))
    throw ConfigError("helper distance outside (0, user-AP distance)");

  const double beta0 = db_to_linear(cfg.beta0_db);
  Scenario s;
  s.bandwidth_hz = cfg.bandwidth_mhz * 1e6;
  s.gain_user_helper = path_loss_gain(d, beta0, cfg.d0_m, cfg.exponent);
  s.gain_user_ap = path_loss_gain(cfg.user_ap_distance_m, beta0, cfg.d0_m, cfg.exponent);
  s.gain_helper_ap =
      path_loss_gain(cfg.user_ap_distance_m - d, beta0, cfg.d0_m, cfg.exponent);
  s.noise_helper_w = dbm_to_watts(cfg.noise_dbm);
  s.noise_ap_w = dbm_to_watts(cfg.noise_dbm);
  s.capacity_gap = cfg.capacity_gap;
  s.p_user_max_w = dbm_to_watts(cfg.p_user_max_dbm);
  s.p_helper_max_w = dbm_to_watts(cfg.p_helper_max_dbm);
  s.cycles_per_bit_user = cfg.cycles_per_bit_user;
  s.cycles_per_bit_helper = cfg.cycles_per_bit_helper;
  s.kappa_user = cfg.kappa_user;
  s.kappa_helper = cfg.kappa_helper;
  s.f_user_max_hz = cfg.f_user_max_ghz * 1e9;
  s.f_helper_max_hz = cfg.f_helper_max_ghz * 1e9;
  s.f_ap_max_hz = cfg.f_ap_max_ghz * 1e9;
  s.block_length_s = T;
  s.task_bits = l_mbit * 1e6;
  s.validate();
  return s;
}

Scenario build_scenario(const ExperimentConfig& cfg) {
  ExperimentConfig base = cfg;
  base.sweep_variable.reset();
  return build_scenario(base, 0.0);
}

std::vector<double> sweep_values(const ExperimentConfig& cfg) {
  if (!cfg.sweep_variable) return {0.0};
  std::vector<double> v;
  const int n = static_cast<int>(
      std::floor((cfg.sweep_stop - cfg.sweep_start) / cfg.sweep_step + 1e-9));
  for (int i = 0; i <= n; ++i) v.push_back(cfg.sweep_start + i * cfg.sweep_step);
  return v;
}

namespace {

bool wants(const ExperimentConfig& cfg, SchemeId id) {
  return std::find(cfg.schemes.begin(), cfg.schemes.end(), id) != cfg.schemes.end();
}

void put_scheme_energy(std::ostream& out, const std::optional<SchemeResult>& r) {
  out << ',';
  if (!r) return;
  if (!r->feasible) {
    out << "infeasible";
    return;
  }
  out << format_double(r->energy_j);
}

const char* status_name(SolveStatus st) {
  switch (st) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_task: return "infeasible_task";
    case SolveStatus::not_converged: return "not_converged";
  }
  return "?";
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const SolveConfig& solve) {
  cfg.validate();
  std::vector<SweepRow> rows;
  if (cfg.schemes.empty()) return rows;
  for (double value : sweep_values(cfg)) {
    const Scenario s = build_scenario(cfg, value);
    SweepRow row;
    row.sweep_value = value;
    if (wants(cfg, SchemeId::local)) row.local = local_only(s);
    if (wants(cfg, SchemeId::computation_coop)) row.computation = computation_coop(s);
    if (wants(cfg, SchemeId::communication_coop)) {
      CommunicationCoopOptions opt;
      opt.literal_full_block = cfg.communication_coop_full_block;
      row.communication = communication_coop(s, opt);
    }
    if (wants(cfg, SchemeId::joint)) row.joint = solve_joint(s, solve);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows,
                     std::ostream& out) {
  out << "sweep_variable,sweep_value,local_energy_j,computation_coop_energy_j,"
         "communication_coop_energy_j,joint_energy_j,joint_status,joint_tau1_s,joint_tau2_s,"
         "joint_tau3_s,joint_tau4_s,joint_p1_w,joint_p2_w,joint_p3_w,joint_bits_local,"
         "joint_bits_helper,joint_bits_ap,joint_dual_value_j,joint_duality_gap_j\n";
  const char* varname = cfg.sweep_variable ? sweep_variable_name(*cfg.sweep_variable) : "none";
  for (const auto& row : rows) {
    out << varname << ',' << format_double(row.sweep_value);
    put_scheme_energy(out, row.local);
    put_scheme_energy(out, row.computation);
    put_scheme_energy(out, row.communication);
    if (row.joint) {
      const SolveReport& j = *row.joint;
      const bool solved = j.status == SolveStatus::optimal;
      out << ',' << (solved ? format_double(j.energy.e_total_j)
                            : std::string(j.status == SolveStatus::infeasible_task
                                              ? "infeasible"
                                              : "not_converged"));
      out << ',' << status_name(j.status);
      if (solved) {
        const Scenario s = build_scenario(cfg, row.sweep_value);
        out << ',' << format_double(j.allocation.tau1_s)
            << ',' << format_double(j.allocation.tau2_s)
            << ',' << format_double(j.allocation.tau3_s)
            << ',' << format_double(j.allocation.tau4_s(s))
            << ',' << format_double(j.allocation.p1_w)
            << ',' << format_double(j.allocation.p2_w)
            << ',' << format_double(j.allocation.p3_w)
            << ',' << format_double(j.allocation.bits_local)
            << ',' << format_double(j.allocation.bits_helper)
            << ',' << format_double(j.allocation.bits_ap)
            << ',' << format_double(j.dual_value_j)
            << ',' << format_double(j.duality_gap_j);
      } else {
        for (int i = 0; i < 12; ++i) out << ',';
      }
    } else {
      for (int i = 0; i < 14; ++i) out << ',';
    }
    out << '\n';
  }
}

std::vector<FeasibilityRow> run_feasibility(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<FeasibilityRow> rows;
  for (double value : sweep_values(cfg)) {
    const Scenario s = build_scenario(cfg, value);
    FeasibilityRow row;
    row.sweep_value = value;
    row.l_max_bits = max_supportable_bits(s).l_max_bits;
    row.requested_bits = s.task_bits;
    row.feasible = s.task_bits <= row.l_max_bits;
    rows.push_back(row);
  }
  return rows;
}

void write_feasibility_csv(const ExperimentConfig& cfg, const std::vector<FeasibilityRow>& rows,
                           std::ostream& out) {
  out << "sweep_variable,sweep_value,l_max_bits,requested_bits,feasible\n";
  const char* varname = cfg.sweep_variable ? sweep_variable_name(*cfg.sweep_variable) : "none";
  for (const auto& row : rows) {
    out << varname << ',' << format_double(row.sweep_value) << ','
        << format_double(row.l_max_bits) << ',' << format_double(row.requested_bits) << ','
        << (row.feasible ? "yes" : "no") << '\n';
  }
}

std::vector<OracleCheckRow> run_oracle_check(const ExperimentConfig& cfg, const GridSpec& grid,
                                             const SolveConfig& solve) {
  cfg.validate();
  std::vector<OracleCheckRow> rows;
  for (double value : sweep_values(cfg)) {
    const Scenario s = build_scenario(cfg, value);
    OracleCheckRow row;
    row.sweep_value = value;
    row.joint = solve_joint(s, solve);
    row.oracle = brute_force_min_energy(s, grid);
    if (row.oracle.feasible && row.joint.status == SolveStatus::optimal) {
      row.rel_diff = std::fabs(row.joint.energy.e_total_j - row.oracle.energy_j) /
                     std::max(row.oracle.energy_j, 1e-300);
    } else {
      row.rel_diff = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_oracle_check_csv(const ExperimentConfig& cfg, const std::vector<OracleCheckRow>& rows,
                            std::ostream& out) {
  out << "sweep_variable,sweep_value,joint_status,joint_energy_j,oracle_energy_j,rel_diff,"
         "duality_gap_j,ellipsoid_iterations\n";
  const char* varname = cfg.sweep_variable ? sweep_variable_name(*cfg.sweep_variable) : "none";
  for (const auto& row : rows) {
    out << varname << ',' << format_double(row.sweep_value) << ','
        << status_name(row.joint.status) << ','
        << format_double(row.joint.energy.e_total_j) << ','
        << (row.oracle.feasible ? format_double(row.oracle.energy_j) : "infeasible") << ','
        << format_double(row.rel_diff) << ',' << format_double(row.joint.duality_gap_j) << ','
        << row.joint.ellipsoid_iterations << '\n';
  }
}

}  // namespace mecc
