#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kappafit/cmaes.hpp"
#include "kappafit/fitness.hpp"
#include "kappafit/specimen_io.hpp"

namespace kappafit::experiment {

enum class Lang { Es, En };

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDataError = 3,
  kExitIoError = 4,
};

struct VariantPreset {
  cmaes::StrategyConfig strategy;
  fitness::FitnessConfig fitness;
};

/// Defaults for the four experiment variants:
///   1  cubic kappa, mu=4, fixed lambda, sentinel-only penalties
///   2  + penalty 1e5 on unsolved candidates, mu=2
///   3  + elite archive with prime-generation reinjection, adaptive lambda, restart
///   4  as 3 with the saturating rational kappa (3 coefficients)
/// Throws ConfigError for any other number.
VariantPreset variant_preset(int variant);

/// Explicit settings that win over the variant preset.
struct Overrides {
  std::optional<std::size_t> max_gens;
  std::optional<std::size_t> mu;
  std::optional<std::size_t> lambda_min;
  std::optional<std::size_t> lambda_max;
  std::optional<double> sigma_init;
  std::optional<double> sigma_min;
  std::optional<double> penalty;
  std::optional<fitness::KappaForm> kappa_form;
  std::optional<std::size_t> eps1_seeds;
  std::optional<std::size_t> threads;
};

struct RunConfig {
  int variant = 4;
  std::filesystem::path database;
  std::filesystem::path hypotheses;
  std::optional<std::filesystem::path> theta_seeds;
  std::filesystem::path output_dir = "kappafit_out";
  std::vector<std::string> specimens;  // empty = whole database
  Overrides overrides;
  std::uint64_t rng_seed = 42;
  bool quiet = false;
  Lang lang = Lang::Es;
};

/// Preset for cfg.variant with overrides applied and validated.
VariantPreset resolve_settings(const RunConfig& cfg);

struct RunResult {
  int exit_code = kExitOk;
  std::string error;
  std::optional<cmaes::EvolveResult> evolve;
  std::optional<io::RunArtifacts> artifacts;
};

/// Loads data, runs the strategy and writes artifacts. Never throws for
/// configuration, data or I/O problems; they map to distinct exit codes.
/// `observer`, if set, is called once per generation.
RunResult run_experiment(const RunConfig& cfg, std::ostream& console,
                         const cmaes::GenerationObserver& observer = {});

// Console lines, mirroring the original transcript wording for Lang::Es.
std::string generation_line(std::size_t generation, std::size_t mu, std::size_t lambda, Lang lang);
std::string candidate_line(const shear::KappaModel& model, Lang lang);
std::string suma_line(double suma, Lang lang);
std::string no_solution_line(Lang lang);
std::string mean_best_line(double mean, double best, Lang lang);
std::string restart_line(Lang lang);

/// Final summary printed after the run; file artifacts are written separately.
void emit_report(std::ostream& out, const cmaes::EvolveResult& result,
                 const std::optional<shear::KappaModel>& best_model,
                 const std::optional<fitness::EvaluationReport>& best_report, Lang lang);

}  // namespace kappafit::experiment
