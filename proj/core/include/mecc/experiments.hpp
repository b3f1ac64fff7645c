// Experiment harness: scenario construction from a physical layout, parameter
// sweeps over the block length, the task size or the helper position, and
// deterministic CSV emission. The config format is a flat list of dotted
// key = value lines with '#' comments; radio quantities use the customary
// engineering units (MHz, dBm, GHz, Mbit) and are converted at ingestion.
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecc/dual.hpp"
#include "mecc/model.hpp"
#include "mecc/oracle.hpp"
#include "mecc/schemes.hpp"

namespace mecc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SweepVariable { block_length, task_bits, helper_distance };

struct ExperimentConfig {
  // Layout: the user and the AP sit a fixed distance apart, the helper on
  // the line between them.
  double user_ap_distance_m = 250;
  double helper_distance_m = 120;

  // Path loss.
  double beta0_db = -60;
  double d0_m = 10;
  double exponent = 3;

  // Radio.
  double bandwidth_mhz = 1;
  double noise_dbm = -70;
  double capacity_gap = 1;

  // Devices.
  double p_user_max_dbm = 40;
  double p_helper_max_dbm = 40;
  double kappa_user = 1e-27;
  double kappa_helper = 0.3e-27;
  double cycles_per_bit_user = 1e3;
  double cycles_per_bit_helper = 1e3;
  double f_user_max_ghz = 2;
  double f_helper_max_ghz = 3;
  double f_ap_max_ghz = 5;

  // Task.
  double block_length_s = 0.1;
  double task_mbit = 0.02;

  // Sweep: T in seconds, L in Mbit, D in meters.
  std::optional<SweepVariable> sweep_variable;
  double sweep_start = 0;
  double sweep_stop = 0;
  double sweep_step = 0;

  std::vector<SchemeId> schemes{SchemeId::local, SchemeId::computation_coop,
                                SchemeId::communication_coop, SchemeId::joint};
  // Literal reading of the communication-only benchmark: the two relay slots
  // fill the whole block and the server execution tail is not budgeted.
  bool communication_coop_full_block = false;
  std::string output_path;
  unsigned long long seed = 0;  // reserved; the model is deterministic

  // Throws ConfigError on an inconsistent layout or an empty sweep range.
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Scenario for one sweep point; with no sweep variable the value is ignored.
Scenario build_scenario(const ExperimentConfig& cfg, double sweep_value);
Scenario build_scenario(const ExperimentConfig& cfg);

std::vector<double> sweep_values(const ExperimentConfig& cfg);

struct SweepRow {
  double sweep_value = 0;
  // One slot per scheme in SchemeId order; disabled schemes stay empty.
  std::optional<SchemeResult> local;
  std::optional<SchemeResult> computation;
  std::optional<SchemeResult> communication;
  std::optional<SolveReport> joint;
};

// Runs the configured schemes at every sweep point. Output is byte-stable:
// fixed column order and 17-significant-digit decimal floats.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const SolveConfig& solve = {});
void write_sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows,
                     std::ostream& out);

struct FeasibilityRow {
  double sweep_value = 0;
  double l_max_bits = 0;
  double requested_bits = 0;
  bool feasible = false;
};
std::vector<FeasibilityRow> run_feasibility(const ExperimentConfig& cfg);
void write_feasibility_csv(const ExperimentConfig& cfg, const std::vector<FeasibilityRow>& rows,
                           std::ostream& out);

struct OracleCheckRow {
  double sweep_value = 0;
  SolveReport joint;
  OracleResult oracle;
  double rel_diff = 0;  // |joint - oracle| / max(oracle, tiny)
};
std::vector<OracleCheckRow> run_oracle_check(const ExperimentConfig& cfg, const GridSpec& grid,
                                             const SolveConfig& solve = {});
void write_oracle_check_csv(const ExperimentConfig& cfg, const std::vector<OracleCheckRow>& rows,
                            std::ostream& out);

// 17 significant digits, enough to round-trip an IEEE-754 double.
std::string format_double(double v);

const char* sweep_variable_name(SweepVariable v);

double dbm_to_watts(double dbm);
double db_to_linear(double db);

}  // namespace mecc
