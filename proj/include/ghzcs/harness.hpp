#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghzcs/circuit.hpp"
#include "ghzcs/coverage.hpp"
#include "ghzcs/fidelity.hpp"
#include "ghzcs/mitigate.hpp"
#include "ghzcs/recover.hpp"
#include "ghzcs/serialize.hpp"
#include "ghzcs/simulate.hpp"

namespace ghzcs {

enum class Backend { Trajectory, Emulator };
enum class ExperimentKind { AccuracySweep, SuccessSweep, FlagSweep, QemSweep };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend backend);
ExperimentKind experiment_kind_from_name(const std::string& name);

// One experiment description; every output is a pure function of it.
struct ExperimentConfig {
  std::vector<int> n_values{10};
  std::vector<int> flags_k{0};
  std::vector<int> m_values{}; // success-sweep sample-count grid
  NoiseModel noise{};
  long long shots = 1000;
  int m_samples = 0; // 0 -> ceil(5 ln N)
  int trials = 100;
  std::uint64_t seed = 1;
  Backend backend = Backend::Emulator;
  bool mitigate_rem = false;
  bool mitigate_dd = false;
  double rem_p01 = -1.0; // < 0 -> noise.p_ro
  double rem_p10 = -1.0;
  int jobs = 0; // 0 -> hardware concurrency
  long long ref_shots_per_angle = 20000;
  int bootstrap_resamples = 0; // 0 -> no bootstrap

  int m_for(int n) const;
  ConfusionModel confusion() const;
  void validate() const;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& config);

// One measured configuration: M parity circuits plus one Z-basis circuit,
// post-selected on clean flags, readout-corrected when asked.
struct RunResult {
  std::vector<double> phis;
  std::vector<ParitySample> samples_raw; // post-selection only
  std::vector<ParitySample> samples;     // after REM, when enabled
  CountsTable population_counts;         // post-selected, data bits only
  double population_raw = 0.0;
  double population = 0.0; // after REM, unclamped
  double retained_fraction = 1.0;
  FlagPlan plan;
  GateCounts parity_gate_counts;
};

RunResult run_parity_experiment(const ExperimentConfig& config, int n, int k,
                                std::uint64_t seed);

FidelityReport estimate_run(const RunResult& run,
                            const ExperimentConfig& config, int n,
                            std::uint64_t seed);

// Coherence of the prepared state measured through the full parity grid on
// the trajectory backend, Fourier-estimated per batch; sigma is the standard
// error over batches (0 when batches == 1).
struct GridCoherenceEstimate {
  double c_mean = 0.0;
  double c_sigma = 0.0;
  int batches = 1;
};

GridCoherenceEstimate trajectory_grid_coherence(int n, const NoiseModel& noise,
                                                long long shots_per_angle,
                                                int batches,
                                                std::uint64_t seed, int jobs);

struct AccuracyRow {
  int n = 0;
  int trial = 0;
  double c_est = 0.0;
  double c_ref = 0.0;
  double abs_error = 0.0;
  bool ok = true;
  std::string error;
};

struct AccuracySummary {
  int n = 0;
  double median = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  int trials_ok = 0;
};

struct AccuracyResult {
  std::vector<AccuracyRow> rows;
  std::vector<AccuracySummary> summary;
};

// Reference is trajectory-derived for N <= 10 and the analytic emulator
// coherence above that; trials always sample through the matching backend.
AccuracyResult accuracy_sweep(const ExperimentConfig& config);

struct SuccessRow {
  int m = 0;
  double success_rate = 0.0;
  int trials = 0;
};

struct SuccessSummary {
  int m = 0;
  double success_rate = 0.0;
  double median_abs_error = 0.0; // |C_est - C_ref| over trials
  double p95_abs_error = 0.0;
  int trials = 0;
};

struct SuccessResult {
  std::vector<SuccessRow> rows;
  std::vector<SuccessSummary> summary;
};

SuccessResult success_sweep(const ExperimentConfig& config);

struct FlagRow {
  std::string mitigation;
  int k = 0;
  int trial = 0;
  double coverage_ratio = 0.0;
  double population = 0.0;
  double coherence = 0.0;
  double theta = 0.0;
  double f_standard = 0.0;
  double f_rotated = 0.0;
  double retained_fraction = 1.0;
  bool ok = true;
  std::string error;
};

struct FlagSummary {
  std::string mitigation;
  int k = 0;
  double coverage_ratio = 0.0;
  double population = 0.0; // medians over trials
  double coherence = 0.0;
  double f_standard = 0.0;
  double f_rotated = 0.0;
  double retained_fraction = 1.0;
  int trials_ok = 0;
};

struct FlagResult {
  std::vector<FlagRow> rows;
  std::vector<FlagSummary> summary;
};

FlagResult flag_sweep(const ExperimentConfig& config);
// flag_sweep repeated for {unmitigated, rem, dd, rem+dd}.
FlagResult qem_sweep(const ExperimentConfig& config);

std::string accuracy_rows_to_csv(const std::vector<AccuracyRow>& rows);
std::string accuracy_summary_to_csv(const std::vector<AccuracySummary>& rows);
std::string success_rows_to_csv(const std::vector<SuccessRow>& rows);
std::string success_summary_to_csv(const std::vector<SuccessSummary>& rows);
std::string flag_rows_to_csv(const std::vector<FlagRow>& rows,
                             const std::string& kind);
std::string flag_summary_to_csv(const std::vector<FlagSummary>& rows,
                                const std::string& kind);

// CLI entry points. All outputs are deterministic in (options, seed);
// timestamps only ever go to the sidecar run.log.
struct BuildOptions {
  int n = 10;
  int k = 0;
  std::string shape = "doubling"; // or "perfect" (n = 2^d - 1)
  std::string out_dir = ".";
};

void cmd_build(const BuildOptions& options);
void cmd_run(const ExperimentConfig& config, const std::string& out_dir);
void cmd_recover(const std::string& samples_path, int n_max,
                 const RecoveryConfig& recovery, const std::string& out_path);

struct FidelityOptions {
  std::string samples_path;
  std::string counts_path;
  std::string out_path = "fidelity.json";
  int n_max = 0; // 0 -> data bits + 8
  bool rem = false;
  double p01 = 0.0;
  double p10 = 0.0;
  std::string rem_config_path; // JSON {"p01": ..., "p10": ...}
  int bootstrap_resamples = 0;
  std::uint64_t seed = 1;
  double retained_fraction = 1.0; // carried over from the run stage
};

void cmd_fidelity(const FidelityOptions& options);
void cmd_experiment(ExperimentKind kind, const ExperimentConfig& config,
                    const std::string& out_dir);

} // namespace ghzcs
