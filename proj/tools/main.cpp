#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ghzcs/errors.hpp"
#include "ghzcs/harness.hpp"
#include "ghzcs/serialize.hpp"

namespace {

using ghzcs::ExperimentConfig;

// CLI flags override whatever the config file set.
struct ConfigFlags {
  std::optional<std::string> config_path;
  std::vector<int> n;
  std::vector<int> flags;
  std::vector<int> m_values;
  std::optional<long long> shots;
  std::optional<int> m_samples;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::vector<std::string> mitigation;
  std::optional<double> p_1q, p_2q, p_ro, phase_offset;
  std::optional<double> rem_p01, rem_p10;
  std::optional<int> jobs;
  std::optional<long long> ref_shots;
  std::optional<int> bootstrap;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--n", n, "GHZ size(s)");
    app->add_option("--flags", flags, "flag pair count(s)");
    app->add_option("--m-values", m_values, "sample-count grid (success sweep)");
    app->add_option("--shots", shots, "shots per circuit");
    app->add_option("--m-samples", m_samples,
                    "random angles per estimate (default ceil(5 ln N))");
    app->add_option("--trials", trials, "independent trials");
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("--backend", backend, "trajectory | emulator");
    app->add_option("--mitigation", mitigation, "none | rem | dd");
    app->add_option("--p1q", p_1q, "single-qubit depolarizing rate");
    app->add_option("--p2q", p_2q, "two-qubit depolarizing rate");
    app->add_option("--p-ro", p_ro, "readout flip rate per bit");
    app->add_option("--phase-offset", phase_offset,
                    "coherent phase offset (emulator)");
    app->add_option("--rem-p01", rem_p01, "confusion P(1|0) override");
    app->add_option("--rem-p10", rem_p10, "confusion P(0|1) override");
    app->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    app->add_option("--ref-shots-per-angle", ref_shots,
                    "trajectory reference shots per grid angle");
    app->add_option("--bootstrap", bootstrap, "bootstrap resamples (>= 100)");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig config;
    if (config_path) {
      config = ghzcs::config_from_json(
          ghzcs::json::parse(ghzcs::read_text_file(*config_path)));
    }
    if (!n.empty()) config.n_values = n;
    if (!flags.empty()) config.flags_k = flags;
    if (!m_values.empty()) config.m_values = m_values;
    if (shots) config.shots = *shots;
    if (m_samples) config.m_samples = *m_samples;
    if (trials) config.trials = *trials;
    if (seed) config.seed = *seed;
    if (backend) config.backend = ghzcs::backend_from_name(*backend);
    if (!mitigation.empty()) {
      config.mitigate_rem = false;
      config.mitigate_dd = false;
      for (const std::string& m : mitigation) {
        if (m == "rem") {
          config.mitigate_rem = true;
        } else if (m == "dd") {
          config.mitigate_dd = true;
        } else if (m != "none") {
          throw std::invalid_argument("unknown mitigation: " + m);
        }
      }
    }
    if (p_1q) config.noise.p_1q = *p_1q;
    if (p_2q) config.noise.p_2q = *p_2q;
    if (p_ro) config.noise.p_ro = *p_ro;
    if (phase_offset) config.noise.phase_offset = *phase_offset;
    if (rem_p01) config.rem_p01 = *rem_p01;
    if (rem_p10) config.rem_p10 = *rem_p10;
    if (jobs) config.jobs = *jobs;
    if (ref_shots) config.ref_shots_per_angle = *ref_shots;
    if (bootstrap) config.bootstrap_resamples = *bootstrap;
    config.validate();
    return config;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHZ preparation, noisy simulation and compressed-sensing "
               "fidelity estimation"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "write a flagged GHZ circuit");
  ghzcs::BuildOptions build_options;
  build->add_option("--n", build_options.n, "GHZ size")->required();
  build->add_option("--flags,-k", build_options.k, "flag pairs to place");
  build->add_option("--shape", build_options.shape, "doubling | perfect");
  build->add_option("--out-dir", build_options.out_dir, "output directory");

  // run
  auto* run = app.add_subcommand("run", "measure one configuration");
  ConfigFlags run_flags;
  run_flags.attach(run);
  std::string run_out_dir = ".";
  run->add_option("--out-dir", run_out_dir, "output directory");

  // recover
  auto* recover = app.add_subcommand("recover", "two-step coherence recovery");
  std::string recover_samples, recover_out = "recovery.json";
  int recover_n_max = 0;
  double recover_alpha_ratio = 0.1;
  recover->add_option("--samples", recover_samples, "parity-sample CSV")
      ->required();
  recover->add_option("--n-max", recover_n_max, "largest candidate frequency")
      ->required();
  recover->add_option("--alpha-ratio", recover_alpha_ratio,
                      "lasso penalty as a fraction of alpha_max");
  recover->add_option("--out", recover_out, "output JSON path");

  // fidelity
  auto* fidelity = app.add_subcommand("fidelity", "full fidelity report");
  ghzcs::FidelityOptions fidelity_options;
  fidelity->add_option("--samples", fidelity_options.samples_path,
                       "parity-sample CSV")
      ->required();
  fidelity->add_option("--counts", fidelity_options.counts_path,
                       "population counts JSON")
      ->required();
  fidelity->add_option("--out", fidelity_options.out_path, "output JSON path");
  fidelity->add_option("--n-max", fidelity_options.n_max,
                       "largest candidate frequency (0 = data bits + 8)");
  fidelity->add_flag("--rem", fidelity_options.rem,
                     "apply readout-error mitigation");
  fidelity->add_option("--rem-p01", fidelity_options.p01, "confusion P(1|0)");
  fidelity->add_option("--rem-p10", fidelity_options.p10, "confusion P(0|1)");
  fidelity->add_option("--rem-config", fidelity_options.rem_config_path,
                       "confusion model JSON with p01/p10");
  fidelity->add_option("--bootstrap", fidelity_options.bootstrap_resamples,
                       "bootstrap resamples (>= 100)");
  fidelity->add_option("--seed", fidelity_options.seed, "bootstrap seed");
  fidelity->add_option("--retained-fraction",
                       fidelity_options.retained_fraction,
                       "post-selection survival rate of the inputs");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a sweep");
  std::string experiment_kind;
  ConfigFlags experiment_flags;
  experiment
      ->add_option("--kind", experiment_kind,
                   "accuracy_sweep | success_sweep | flag_sweep | qem_sweep")
      ->required();
  experiment_flags.attach(experiment);
  std::string experiment_out_dir = ".";
  experiment->add_option("--out-dir", experiment_out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (build->parsed()) {
      ghzcs::cmd_build(build_options);
    } else if (run->parsed()) {
      ghzcs::cmd_run(run_flags.resolve(), run_out_dir);
    } else if (recover->parsed()) {
      ghzcs::RecoveryConfig recovery_config;
      recovery_config.alpha_ratio = recover_alpha_ratio;
      ghzcs::cmd_recover(recover_samples, recover_n_max, recovery_config,
                         recover_out);
    } else if (fidelity->parsed()) {
      ghzcs::cmd_fidelity(fidelity_options);
    } else if (experiment->parsed()) {
      ghzcs::cmd_experiment(ghzcs::experiment_kind_from_name(experiment_kind),
                            experiment_flags.resolve(), experiment_out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return 2;
  } catch (const ghzcs::ResourceLimitError& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return 3;
  } catch (const ghzcs::EmptyPostselectionError& e) {
    std::fprintf(stderr, "empty post-selection: %s\n", e.what());
    return 4;
  } catch (const ghzcs::DegenerateAnglesError& e) {
    std::fprintf(stderr, "recovery degeneracy: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
