#include "ghzcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ghzcs/errors.hpp"
#include "ghzcs/rng.hpp"

namespace ghzcs {

namespace {

// Seed-path tags so the derived streams of unrelated stages never collide.
constexpr std::uint64_t kTagAngles = 1;
constexpr std::uint64_t kTagCircuit = 2;
constexpr std::uint64_t kTagPopulation = 3;
constexpr std::uint64_t kTagBootstrap = 4;
constexpr std::uint64_t kTagReference = 5;
constexpr std::uint64_t kTagTrial = 6;

// Deterministic regardless of the worker count: item i only ever writes
// slot i of its output vector.
void parallel_for(int n_items, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, n_items));
  if (jobs == 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

CountsTable emulate_population_counts(int n, double c_exp, long long shots,
                                      std::uint64_t seed) {
  // The emulator's state model: ideal GHZ with weight c_exp, uniform noise
  // with the rest; this is the state whose parity signal the emulator draws.
  CountsTable table;
  table.n_bits = n;
  for (int q = 0; q < n; ++q) table.data_bits.push_back(q);
  const std::string zeros(n, '0');
  const std::string ones(n, '1');
  std::mt19937_64 rng = substream(seed, 0);
  std::string key(n, '0');
  for (long long shot = 0; shot < shots; ++shot) {
    if (canonical(rng) < c_exp) {
      table.counts[canonical(rng) < 0.5 ? zeros : ones] += 1;
    } else {
      for (int q = 0; q < n; ++q) key[q] = canonical(rng) < 0.5 ? '0' : '1';
      table.counts[key] += 1;
    }
  }
  return table;
}

std::string percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * ratio);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_sidecar_log(const std::string& out_dir, const std::string& command,
                       const json& config) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  std::ostringstream log;
  log << stamp << " " << command << "\n" << config.dump(2) << "\n";
  write_text_file(join_path(out_dir, "run.log"), log.str());
}

} // namespace

Backend backend_from_name(const std::string& name) {
  if (name == "trajectory") return Backend::Trajectory;
  if (name == "emulator") return Backend::Emulator;
  throw std::invalid_argument("unknown backend: " + name);
}

const char* backend_name(Backend backend) {
  return backend == Backend::Trajectory ? "trajectory" : "emulator";
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "accuracy_sweep") return ExperimentKind::AccuracySweep;
  if (name == "success_sweep") return ExperimentKind::SuccessSweep;
  if (name == "flag_sweep") return ExperimentKind::FlagSweep;
  if (name == "qem_sweep") return ExperimentKind::QemSweep;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

int ExperimentConfig::m_for(int n) const {
  if (m_samples > 0) return m_samples;
  return static_cast<int>(std::ceil(5.0 * std::log(static_cast<double>(n))));
}

ConfusionModel ExperimentConfig::confusion() const {
  ConfusionModel model;
  model.p01 = rem_p01 >= 0.0 ? rem_p01 : noise.p_ro;
  model.p10 = rem_p10 >= 0.0 ? rem_p10 : noise.p_ro;
  model.validate();
  return model;
}

void ExperimentConfig::validate() const {
  noise.validate();
  if (shots < 1) throw std::invalid_argument("shots must be positive");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (n_values.empty()) throw std::invalid_argument("no system sizes given");
  for (int n : n_values) {
    if (n < 2) throw std::invalid_argument("GHZ size must be at least 2");
  }
  for (int k : flags_k) {
    if (k < 0) throw std::invalid_argument("flag count must be nonnegative");
  }
  if (backend == Backend::Trajectory) {
    for (int n : n_values) {
      const int worst_flags =
          flags_k.empty() ? 0 : *std::max_element(flags_k.begin(), flags_k.end());
      if (n + worst_flags > 20) {
        throw ResourceLimitError("trajectory backend requires n + flags <= 20");
      }
    }
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  auto read_int_list = [](const json& v) {
    std::vector<int> out;
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(e.get<int>());
    } else {
      out.push_back(v.get<int>());
    }
    return out;
  };
  if (j.contains("n")) config.n_values = read_int_list(j.at("n"));
  if (j.contains("flags")) config.flags_k = read_int_list(j.at("flags"));
  if (j.contains("m_values")) config.m_values = read_int_list(j.at("m_values"));
  if (j.contains("noise")) {
    const auto& nj = j.at("noise");
    if (nj.contains("p_1q")) config.noise.p_1q = nj.at("p_1q").get<double>();
    if (nj.contains("p_2q")) config.noise.p_2q = nj.at("p_2q").get<double>();
    if (nj.contains("p_ro")) config.noise.p_ro = nj.at("p_ro").get<double>();
    if (nj.contains("phase_offset")) {
      config.noise.phase_offset = nj.at("phase_offset").get<double>();
    }
  }
  if (j.contains("shots")) config.shots = j.at("shots").get<long long>();
  if (j.contains("m_samples")) {
    const auto& m = j.at("m_samples");
    if (m.is_string()) {
      if (m.get<std::string>() != "5lnN") {
        throw std::invalid_argument("m_samples must be an integer or \"5lnN\"");
      }
      config.m_samples = 0;
    } else {
      config.m_samples = m.get<int>();
    }
  }
  if (j.contains("trials")) config.trials = j.at("trials").get<int>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("backend")) {
    config.backend = backend_from_name(j.at("backend").get<std::string>());
  }
  if (j.contains("mitigation")) {
    for (const auto& m : j.at("mitigation")) {
      const std::string name = m.get<std::string>();
      if (name == "rem") {
        config.mitigate_rem = true;
      } else if (name == "dd") {
        config.mitigate_dd = true;
      } else if (name != "none") {
        throw std::invalid_argument("unknown mitigation: " + name);
      }
    }
  }
  if (j.contains("rem_p01")) config.rem_p01 = j.at("rem_p01").get<double>();
  if (j.contains("rem_p10")) config.rem_p10 = j.at("rem_p10").get<double>();
  if (j.contains("jobs")) config.jobs = j.at("jobs").get<int>();
  if (j.contains("ref_shots_per_angle")) {
    config.ref_shots_per_angle = j.at("ref_shots_per_angle").get<long long>();
  }
  if (j.contains("bootstrap")) {
    config.bootstrap_resamples = j.at("bootstrap").get<int>();
  }
  config.validate();
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["n"] = config.n_values;
  j["flags"] = config.flags_k;
  if (!config.m_values.empty()) j["m_values"] = config.m_values;
  j["noise"] = json{{"p_1q", config.noise.p_1q},
                    {"p_2q", config.noise.p_2q},
                    {"p_ro", config.noise.p_ro},
                    {"phase_offset", config.noise.phase_offset}};
  j["shots"] = config.shots;
  if (config.m_samples > 0) {
    j["m_samples"] = config.m_samples;
  } else {
    j["m_samples"] = "5lnN";
  }
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["backend"] = backend_name(config.backend);
  json mit = json::array();
  if (config.mitigate_rem) mit.push_back("rem");
  if (config.mitigate_dd) mit.push_back("dd");
  if (mit.empty()) mit.push_back("none");
  j["mitigation"] = std::move(mit);
  if (config.rem_p01 >= 0.0) j["rem_p01"] = config.rem_p01;
  if (config.rem_p10 >= 0.0) j["rem_p10"] = config.rem_p10;
  j["jobs"] = config.jobs;
  j["ref_shots_per_angle"] = config.ref_shots_per_angle;
  if (config.bootstrap_resamples > 0) {
    j["bootstrap"] = config.bootstrap_resamples;
  }
  return j;
}

RunResult run_parity_experiment(const ExperimentConfig& config, int n, int k,
                                std::uint64_t seed) {
  RunResult run;
  auto [base, tree] = build_ghz_tree(n);
  run.plan = greedy_flag_placement(tree, k);
  const int m = config.m_for(n);
  run.phis = sample_angles(m, derive_seed(seed, {kTagAngles}));

  if (config.backend == Backend::Emulator) {
    if (k > 0) {
      throw std::invalid_argument(
          "emulator backend does not model flag checks");
    }
    if (config.mitigate_rem) {
      throw std::invalid_argument(
          "readout mitigation needs measured counts; use the trajectory "
          "backend");
    }
    Circuit parity = attach_parity_measurement(base, 0.0);
    if (config.mitigate_dd) parity = insert_dd(parity);
    run.parity_gate_counts = count_gates(parity);
    run.samples_raw =
        emulate_fast_parity(n, run.parity_gate_counts, config.noise, run.phis,
                            config.shots, derive_seed(seed, {kTagCircuit}));
    run.samples = run.samples_raw;
    const double c_exp = expected_coherence(run.parity_gate_counts,
                                            config.noise);
    run.population_counts = emulate_population_counts(
        n, c_exp, config.shots, derive_seed(seed, {kTagPopulation}));
    run.population_raw = population_from_counts(run.population_counts);
    run.population = run.population_raw;
    return run;
  }

  const Circuit flagged = attach_flag_checks(base, tree, run.plan.pairs);
  std::vector<Circuit> circuits;
  circuits.reserve(m + 1);
  {
    Circuit z = attach_z_measurement(flagged);
    if (config.mitigate_dd) z = insert_dd(z);
    circuits.push_back(std::move(z));
  }
  for (double phi : run.phis) {
    Circuit parity = attach_parity_measurement(flagged, phi);
    if (config.mitigate_dd) parity = insert_dd(parity);
    circuits.push_back(std::move(parity));
  }
  run.parity_gate_counts = count_gates(circuits.back());

  std::vector<PostselectionResult> selected(circuits.size());
  parallel_for(static_cast<int>(circuits.size()), config.jobs, [&](int i) {
    const CountsTable counts = run_statevector_trajectories(
        circuits[i], config.noise, config.shots,
        derive_seed(seed, {kTagCircuit, static_cast<std::uint64_t>(i)}));
    try {
      selected[i] = postselect_flags(counts);
    } catch (const EmptyPostselectionError&) {
      throw EmptyPostselectionError(
          "all " + std::to_string(config.shots) + " shots were flagged in " +
          (i == 0 ? std::string("the Z-basis circuit")
                  : "parity circuit " + std::to_string(i - 1)) +
          " (retained fraction 0)");
    }
  });

  double retained = 0.0;
  for (const auto& sel : selected) retained += sel.retained_fraction;
  run.retained_fraction = retained / static_cast<double>(selected.size());

  run.population_counts = selected[0].counts;
  run.population_raw = population_from_counts(run.population_counts);
  run.population = run.population_raw;
  for (int i = 0; i < m; ++i) {
    const auto [parity, kept] =
        parity_expectation_from_counts(selected[i + 1].counts);
    run.samples_raw.push_back({run.phis[i], parity, kept});
  }
  run.samples = run.samples_raw;

  if (config.mitigate_rem) {
    const ConfusionModel model = config.confusion();
    run.population = rem_population(run.population_counts, model);
    for (ParitySample& s : run.samples) {
      s.parity = rem_parity(s.parity, n, model);
    }
  }
  return run;
}

FidelityReport estimate_run(const RunResult& run,
                            const ExperimentConfig& config, int n,
                            std::uint64_t seed) {
  const int n_max = n + 8;
  RecoveryConfig recovery_config;
  const RecoveryResult recovery =
      recover_coherence(run.phis, run.samples, n_max, recovery_config);
  FidelityReport report = estimate_fidelity(
      std::clamp(run.population, 0.0, 1.0), recovery);
  report.retained_fraction = run.retained_fraction;

  if (config.mitigate_rem || config.mitigate_dd) {
    MitigationInfo info;
    info.rem = config.mitigate_rem;
    info.dd = config.mitigate_dd;
    if (config.mitigate_rem) {
      const ConfusionModel model = config.confusion();
      info.p01 = model.p01;
      info.p10 = model.p10;
      info.coherence_raw =
          recover_coherence(run.phis, run.samples_raw, n_max, recovery_config)
              .coherence;
    } else {
      info.coherence_raw = recovery.coherence;
    }
    info.population_raw = run.population_raw;
    report.mitigation = info;
  }

  if (config.bootstrap_resamples >= 100) {
    PipelineConfig pipeline;
    pipeline.n_max = n_max;
    pipeline.recovery = recovery_config;
    if (config.mitigate_rem) pipeline.rem = config.confusion();
    report.ci = bootstrap_ci(run.samples_raw, run.population_counts,
                             config.bootstrap_resamples,
                             derive_seed(seed, {kTagBootstrap}), pipeline);
  }
  return report;
}

GridCoherenceEstimate trajectory_grid_coherence(int n, const NoiseModel& noise,
                                                long long shots_per_angle,
                                                int batches,
                                                std::uint64_t seed, int jobs) {
  if (batches < 1) throw std::invalid_argument("need at least one batch");
  auto [base, tree] = build_ghz_tree(n);
  const std::vector<double> phis = fourier_grid_angles(n);
  const int n_angles = static_cast<int>(phis.size());

  std::vector<double> parities(static_cast<std::size_t>(batches) * n_angles);
  parallel_for(batches * n_angles, jobs, [&](int item) {
    const int b = item / n_angles;
    const int j = item % n_angles;
    const Circuit circuit = attach_parity_measurement(base, phis[j]);
    const CountsTable counts = run_statevector_trajectories(
        circuit, noise, shots_per_angle,
        derive_seed(seed, {kTagReference, static_cast<std::uint64_t>(b),
                           static_cast<std::uint64_t>(j)}));
    parities[item] = parity_expectation_from_counts(counts).first;
  });

  std::vector<double> cs(batches);
  for (int b = 0; b < batches; ++b) {
    const std::vector<double> batch(parities.begin() + b * n_angles,
                                    parities.begin() + (b + 1) * n_angles);
    cs[b] = fourier_grid_estimate(batch, n).first;
  }
  GridCoherenceEstimate est;
  est.batches = batches;
  double mean = 0.0;
  for (double c : cs) mean += c;
  mean /= batches;
  est.c_mean = mean;
  if (batches > 1) {
    double ss = 0.0;
    for (double c : cs) ss += (c - mean) * (c - mean);
    est.c_sigma = std::sqrt(ss / (batches - 1)) / std::sqrt(batches);
  }
  return est;
}

AccuracyResult accuracy_sweep(const ExperimentConfig& config) {
  config.validate();
  AccuracyResult result;
  for (int n : config.n_values) {
    const bool small = n <= 10;
    double c_ref;
    GateCounts parity_counts;
    {
      auto [base, tree] = build_ghz_tree(n);
      parity_counts = count_gates(attach_parity_measurement(base, 0.0));
    }
    if (small) {
      c_ref = trajectory_grid_coherence(
                  n, config.noise, config.ref_shots_per_angle, 1,
                  derive_seed(config.seed,
                              {kTagReference, static_cast<std::uint64_t>(n)}),
                  config.jobs)
                  .c_mean;
    } else {
      c_ref = expected_coherence(parity_counts, config.noise);
    }

    std::vector<AccuracyRow> rows(config.trials);
    auto [base, tree] = build_ghz_tree(n);
    parallel_for(config.trials, small ? config.jobs : 1, [&](int trial) {
      AccuracyRow row;
      row.n = n;
      row.trial = trial;
      row.c_ref = c_ref;
      const std::uint64_t tseed =
          derive_seed(config.seed, {kTagTrial, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial)});
      try {
        const int m = config.m_for(n);
        const std::vector<double> phis =
            sample_angles(m, derive_seed(tseed, {kTagAngles}));
        std::vector<ParitySample> samples;
        if (small) {
          samples.reserve(m);
          for (int i = 0; i < m; ++i) {
            const Circuit circuit = attach_parity_measurement(base, phis[i]);
            const CountsTable counts = run_statevector_trajectories(
                circuit, config.noise, config.shots,
                derive_seed(tseed, {kTagCircuit,
                                    static_cast<std::uint64_t>(i)}));
            const auto [parity, kept] = parity_expectation_from_counts(counts);
            samples.push_back({phis[i], parity, kept});
          }
        } else {
          samples = emulate_fast_parity(n, parity_counts, config.noise, phis,
                                        config.shots,
                                        derive_seed(tseed, {kTagCircuit}));
        }
        const RecoveryResult rec = recover_coherence(phis, samples, n + 8);
        row.c_est = rec.coherence;
        row.abs_error = std::abs(rec.coherence - c_ref);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows[trial] = row;
    });

    std::vector<double> errors;
    for (const AccuracyRow& row : rows) {
      result.rows.push_back(row);
      if (row.ok) errors.push_back(row.abs_error);
    }
    AccuracySummary summary;
    summary.n = n;
    summary.trials_ok = static_cast<int>(errors.size());
    summary.median = median_of(errors);
    summary.p5 = quantile_of(errors, 0.05);
    summary.p95 = quantile_of(errors, 0.95);
    result.summary.push_back(summary);
  }
  return result;
}

SuccessResult success_sweep(const ExperimentConfig& config) {
  config.validate();
  const int n = config.n_values.front();
  std::vector<int> ms = config.m_values;
  if (ms.empty()) ms = {4, 8, 12, 15, 17, 20, 25};

  GateCounts parity_counts;
  {
    auto [base, tree] = build_ghz_tree(n);
    parity_counts = count_gates(attach_parity_measurement(base, 0.0));
  }
  const double c_ref = expected_coherence(parity_counts, config.noise);

  SuccessResult result;
  for (int m : ms) {
    std::vector<char> success(config.trials, 0);
    std::vector<double> errors(config.trials, 0.0);
    parallel_for(config.trials, config.jobs, [&](int trial) {
      const std::uint64_t tseed =
          derive_seed(config.seed, {kTagTrial, static_cast<std::uint64_t>(m),
                                    static_cast<std::uint64_t>(trial)});
      const std::vector<double> phis =
          sample_angles(m, derive_seed(tseed, {kTagAngles}));
      const std::vector<ParitySample> samples =
          emulate_fast_parity(n, parity_counts, config.noise, phis,
                              config.shots, derive_seed(tseed, {kTagCircuit}));
      const RecoveryResult rec = recover_coherence(phis, samples, n + 8);
      success[trial] = rec.n_rec == n ? 1 : 0;
      errors[trial] = std::abs(rec.coherence - c_ref);
    });
    long long wins = 0;
    for (char s : success) wins += s;
    const double rate = static_cast<double>(wins) / config.trials;
    result.rows.push_back({m, rate, config.trials});
    SuccessSummary summary;
    summary.m = m;
    summary.success_rate = rate;
    summary.median_abs_error = median_of(errors);
    summary.p95_abs_error = quantile_of(errors, 0.95);
    summary.trials = config.trials;
    result.summary.push_back(summary);
  }
  return result;
}

namespace {

FlagResult flag_sweep_variants(
    const ExperimentConfig& config,
    const std::vector<std::pair<std::string, std::pair<bool, bool>>>& variants) {
  config.validate();
  if (config.backend != Backend::Trajectory) {
    throw std::invalid_argument("flag sweeps need the trajectory backend");
  }
  const int n = config.n_values.front();

  FlagResult result;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const auto& [name, toggles] = variants[v];
    ExperimentConfig variant = config;
    variant.mitigate_rem = toggles.first;
    variant.mitigate_dd = toggles.second;
    for (int k : config.flags_k) {
      std::vector<FlagRow> rows(config.trials);
      parallel_for(config.trials, config.jobs, [&](int trial) {
        FlagRow row;
        row.mitigation = name;
        row.k = k;
        row.trial = trial;
        const std::uint64_t rseed = derive_seed(
            config.seed, {kTagTrial, v, static_cast<std::uint64_t>(k),
                          static_cast<std::uint64_t>(trial)});
        try {
          const RunResult run = run_parity_experiment(variant, n, k, rseed);
          const FidelityReport report = estimate_run(run, variant, n, rseed);
          row.coverage_ratio = run.plan.total_ratio;
          row.population = report.population;
          row.coherence = report.coherence;
          row.theta = report.theta;
          row.f_standard = report.f_standard;
          row.f_rotated = report.f_rotated;
          row.retained_fraction = report.retained_fraction;
        } catch (const std::exception& e) {
          row.ok = false;
          row.error = e.what();
        }
        rows[trial] = row;
      });

      FlagSummary summary;
      summary.mitigation = name;
      summary.k = k;
      std::vector<double> pop, coh, fs, fr, ret;
      for (const FlagRow& row : rows) {
        result.rows.push_back(row);
        if (!row.ok) continue;
        summary.coverage_ratio = row.coverage_ratio;
        pop.push_back(row.population);
        coh.push_back(row.coherence);
        fs.push_back(row.f_standard);
        fr.push_back(row.f_rotated);
        ret.push_back(row.retained_fraction);
      }
      summary.trials_ok = static_cast<int>(pop.size());
      summary.population = median_of(pop);
      summary.coherence = median_of(coh);
      summary.f_standard = median_of(fs);
      summary.f_rotated = median_of(fr);
      summary.retained_fraction = median_of(ret);
      result.summary.push_back(summary);
    }
  }
  return result;
}

} // namespace

FlagResult flag_sweep(const ExperimentConfig& config) {
  std::string name = "none";
  if (config.mitigate_rem && config.mitigate_dd) {
    name = "rem+dd";
  } else if (config.mitigate_rem) {
    name = "rem";
  } else if (config.mitigate_dd) {
    name = "dd";
  }
  return flag_sweep_variants(
      config, {{name, {config.mitigate_rem, config.mitigate_dd}}});
}

FlagResult qem_sweep(const ExperimentConfig& config) {
  return flag_sweep_variants(config, {{"none", {false, false}},
                                      {"rem", {true, false}},
                                      {"dd", {false, true}},
                                      {"rem+dd", {true, true}}});
}

std::string accuracy_rows_to_csv(const std::vector<AccuracyRow>& rows) {
  std::ostringstream out;
  out << "# schema: ghzcs.accuracy_sweep.v1\n";
  out << "n,trial,c_est,c_ref,abs_error,status\n";
  for (const AccuracyRow& r : rows) {
    out << r.n << ',' << r.trial << ',' << format_double(r.c_est) << ','
        << format_double(r.c_ref) << ',' << format_double(r.abs_error) << ','
        << (r.ok ? "ok" : "error") << '\n';
  }
  return out.str();
}

std::string accuracy_summary_to_csv(const std::vector<AccuracySummary>& rows) {
  std::ostringstream out;
  out << "# schema: ghzcs.accuracy_sweep_summary.v1\n";
  out << "n,median_abs_error,p5_abs_error,p95_abs_error,trials_ok\n";
  for (const AccuracySummary& r : rows) {
    out << r.n << ',' << format_double(r.median) << ',' << format_double(r.p5)
        << ',' << format_double(r.p95) << ',' << r.trials_ok << '\n';
  }
  return out.str();
}

std::string success_summary_to_csv(const std::vector<SuccessSummary>& rows) {
  std::ostringstream out;
  out << "# schema: ghzcs.success_sweep_summary.v1\n";
  out << "m,success_rate,median_abs_error,p95_abs_error,trials\n";
  for (const SuccessSummary& r : rows) {
    out << r.m << ',' << format_double(r.success_rate) << ','
        << format_double(r.median_abs_error) << ','
        << format_double(r.p95_abs_error) << ',' << r.trials << '\n';
  }
  return out.str();
}

std::string success_rows_to_csv(const std::vector<SuccessRow>& rows) {
  std::ostringstream out;
  out << "# schema: ghzcs.success_sweep.v1\n";
  out << "m,success_rate,trials\n";
  for (const SuccessRow& r : rows) {
    out << r.m << ',' << format_double(r.success_rate) << ',' << r.trials
        << '\n';
  }
  return out.str();
}

std::string flag_rows_to_csv(const std::vector<FlagRow>& rows,
                             const std::string& kind) {
  std::ostringstream out;
  out << "# schema: ghzcs." << kind << ".v1\n";
  out << "mitigation,k,trial,coverage_ratio,population,coherence,theta,"
         "f_standard,f_rotated,retained_fraction,status\n";
  for (const FlagRow& r : rows) {
    out << r.mitigation << ',' << r.k << ',' << r.trial << ','
        << format_double(r.coverage_ratio) << ',' << format_double(r.population)
        << ',' << format_double(r.coherence) << ',' << format_double(r.theta)
        << ',' << format_double(r.f_standard) << ','
        << format_double(r.f_rotated) << ','
        << format_double(r.retained_fraction) << ','
        << (r.ok ? "ok" : "error") << '\n';
  }
  return out.str();
}

std::string flag_summary_to_csv(const std::vector<FlagSummary>& rows,
                                const std::string& kind) {
  std::ostringstream out;
  out << "# schema: ghzcs." << kind << "_summary.v1\n";
  out << "mitigation,k,coverage_ratio,population,coherence,f_standard,"
         "f_rotated,retained_fraction,trials_ok\n";
  for (const FlagSummary& r : rows) {
    out << r.mitigation << ',' << r.k << ',' << format_double(r.coverage_ratio)
        << ',' << format_double(r.population) << ','
        << format_double(r.coherence) << ',' << format_double(r.f_standard)
        << ',' << format_double(r.f_rotated) << ','
        << format_double(r.retained_fraction) << ',' << r.trials_ok << '\n';
  }
  return out.str();
}

void cmd_build(const BuildOptions& options) {
  auto [circuit, tree] = options.shape == "perfect"
                             ? build_perfect_tree(options.n)
                             : build_ghz_tree(options.n);
  if (options.shape != "perfect" && options.shape != "doubling") {
    throw std::invalid_argument("unknown tree shape: " + options.shape);
  }
  const FlagPlan plan = greedy_flag_placement(tree, options.k);
  const Circuit flagged = attach_flag_checks(circuit, tree, plan.pairs);

  ensure_dir(options.out_dir);
  write_text_file(join_path(options.out_dir, "circuit.json"),
                  circuit_to_json(flagged).dump(2) + "\n");
  write_text_file(join_path(options.out_dir, "flag_plan.json"),
                  flag_plan_to_json(plan).dump(2) + "\n");

  std::printf("pair        gain  cumulative coverage\n");
  int cumulative = 0;
  for (std::size_t i = 0; i < plan.pairs.size(); ++i) {
    cumulative += plan.marginal_gains[i];
    std::printf("(%d, %d)%*s %4d  %s\n", plan.pairs[i].first,
                plan.pairs[i].second,
                std::max(0, 8 - static_cast<int>(std::to_string(
                                    plan.pairs[i].first).size() +
                                std::to_string(plan.pairs[i].second).size())),
                "", plan.marginal_gains[i],
                percent(static_cast<double>(cumulative) / tree.n).c_str());
  }
  std::printf("total: %s of %d qubits covered by %zu checks\n",
              percent(plan.total_ratio).c_str(), tree.n, plan.pairs.size());
}

void cmd_run(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  const int n = config.n_values.front();
  const int k = config.flags_k.front();
  const RunResult run = run_parity_experiment(config, n, k, config.seed);

  ensure_dir(out_dir);
  write_text_file(join_path(out_dir, "parity_samples.csv"),
                  parity_samples_to_csv(run.samples));
  if (config.mitigate_rem) {
    write_text_file(join_path(out_dir, "parity_samples_raw.csv"),
                    parity_samples_to_csv(run.samples_raw));
  }
  write_text_file(join_path(out_dir, "population_counts.json"),
                  counts_to_json(run.population_counts).dump(2) + "\n");

  json meta;
  meta["n"] = n;
  meta["k"] = k;
  meta["m_samples"] = static_cast<int>(run.phis.size());
  meta["retained_fraction"] = run.retained_fraction;
  meta["population_raw"] = run.population_raw;
  meta["population"] = run.population;
  meta["coverage_ratio"] = run.plan.total_ratio;
  meta["flag_plan"] = flag_plan_to_json(run.plan);
  meta["gate_counts"] = json{{"n_1q", run.parity_gate_counts.n_1q},
                             {"n_cx", run.parity_gate_counts.n_cx}};
  write_text_file(join_path(out_dir, "run_meta.json"), meta.dump(2) + "\n");
  write_text_file(join_path(out_dir, "config.json"),
                  config_to_json(config).dump(2) + "\n");
  write_sidecar_log(out_dir, "run", config_to_json(config));
}

void cmd_recover(const std::string& samples_path, int n_max,
                 const RecoveryConfig& recovery, const std::string& out_path) {
  const std::vector<ParitySample> samples =
      parity_samples_from_csv(read_text_file(samples_path));
  std::vector<double> phis;
  phis.reserve(samples.size());
  for (const ParitySample& s : samples) phis.push_back(s.phi);
  const RecoveryResult result =
      recover_coherence(phis, samples, n_max, recovery);
  write_text_file(out_path, recovery_result_to_json(result).dump(2) + "\n");
}

void cmd_fidelity(const FidelityOptions& options) {
  const std::vector<ParitySample> samples_raw =
      parity_samples_from_csv(read_text_file(options.samples_path));
  const CountsTable counts =
      counts_from_json(json::parse(read_text_file(options.counts_path)));
  if (!counts.flag_bits.empty()) {
    throw std::invalid_argument(
        "population counts must be post-selected (data bits only)");
  }
  const int n = counts.n_bits;
  const int n_max = options.n_max > 0 ? options.n_max : n + 8;

  std::vector<double> phis;
  phis.reserve(samples_raw.size());
  for (const ParitySample& s : samples_raw) phis.push_back(s.phi);

  std::vector<ParitySample> samples = samples_raw;
  double population = population_from_counts(counts);
  const double population_raw = population;
  std::optional<ConfusionModel> rem;
  if (options.rem || !options.rem_config_path.empty()) {
    ConfusionModel model{options.p01, options.p10};
    if (!options.rem_config_path.empty()) {
      model = confusion_from_json(
          json::parse(read_text_file(options.rem_config_path)));
    }
    model.validate();
    rem = model;
    population = rem_population(counts, model);
    for (ParitySample& s : samples) {
      s.parity = rem_parity(s.parity, n, model);
    }
  }

  RecoveryConfig recovery_config;
  const RecoveryResult recovery =
      recover_coherence(phis, samples, n_max, recovery_config);
  FidelityReport report =
      estimate_fidelity(std::clamp(population, 0.0, 1.0), recovery);
  report.retained_fraction = options.retained_fraction;
  if (rem) {
    MitigationInfo info;
    info.rem = true;
    info.p01 = rem->p01;
    info.p10 = rem->p10;
    info.population_raw = population_raw;
    info.coherence_raw =
        recover_coherence(phis, samples_raw, n_max, recovery_config).coherence;
    report.mitigation = info;
  }
  if (options.bootstrap_resamples >= 100) {
    PipelineConfig pipeline;
    pipeline.n_max = n_max;
    pipeline.recovery = recovery_config;
    pipeline.rem = rem;
    report.ci = bootstrap_ci(samples_raw, counts, options.bootstrap_resamples,
                             derive_seed(options.seed, {kTagBootstrap}),
                             pipeline);
  }
  write_text_file(options.out_path,
                  fidelity_report_to_json(report).dump(2) + "\n");
}

void cmd_experiment(ExperimentKind kind, const ExperimentConfig& config,
                    const std::string& out_dir) {
  config.validate();
  ensure_dir(out_dir);
  switch (kind) {
    case ExperimentKind::AccuracySweep: {
      const AccuracyResult result = accuracy_sweep(config);
      write_text_file(join_path(out_dir, "accuracy_sweep.csv"),
                      accuracy_rows_to_csv(result.rows));
      write_text_file(join_path(out_dir, "accuracy_sweep_summary.csv"),
                      accuracy_summary_to_csv(result.summary));
      break;
    }
    case ExperimentKind::SuccessSweep: {
      const SuccessResult result = success_sweep(config);
      write_text_file(join_path(out_dir, "success_sweep.csv"),
                      success_rows_to_csv(result.rows));
      write_text_file(join_path(out_dir, "success_sweep_summary.csv"),
                      success_summary_to_csv(result.summary));
      break;
    }
    case ExperimentKind::FlagSweep: {
      const FlagResult result = flag_sweep(config);
      write_text_file(join_path(out_dir, "flag_sweep.csv"),
                      flag_rows_to_csv(result.rows, "flag_sweep"));
      write_text_file(join_path(out_dir, "flag_sweep_summary.csv"),
                      flag_summary_to_csv(result.summary, "flag_sweep"));
      break;
    }
    case ExperimentKind::QemSweep: {
      const FlagResult result = qem_sweep(config);
      write_text_file(join_path(out_dir, "qem_sweep.csv"),
                      flag_rows_to_csv(result.rows, "qem_sweep"));
      write_text_file(join_path(out_dir, "qem_sweep_summary.csv"),
                      flag_summary_to_csv(result.summary, "qem_sweep"));
      break;
    }
  }
  write_text_file(join_path(out_dir, "config.json"),
                  config_to_json(config).dump(2) + "\n");
  write_sidecar_log(out_dir, "experiment", config_to_json(config));
}

} // namespace ghzcs
