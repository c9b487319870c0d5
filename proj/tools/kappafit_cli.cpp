// Command-line entry point: fits the degradation function kappa(eps1) with
// one of the four strategy variants and writes logs, archive, report and
// curve samples into the output directory.

#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "kappafit/experiment.hpp"

namespace ex = kappafit::experiment;

int main(int argc, char** argv) {
  CLI::App app{"kappafit - CMA-ES fit of the concrete degradation parameter kappa(eps1)"};
  app.set_config("--config", "", "Flat key=value file mirroring the long flag names");

  ex::RunConfig cfg;
  std::string database;
  std::string hypotheses;
  std::string theta_seeds;
  std::string output_dir = cfg.output_dir.string();
  std::string kappa_form;
  std::string lang = "es";
  std::size_t max_gens = 0, mu = 0, lambda_min = 0, lambda_max = 0, eps1_seeds = 0, threads = 0;
  double sigma_init = 0.0, sigma_min = 0.0, penalty = 0.0;

  app.add_option("--variant", cfg.variant, "Strategy variant 1-4")->check(CLI::Range(1, 4));
  app.add_option("--database", database, "Specimen database CSV")->required();
  app.add_option("--hypotheses", hypotheses, "Valid behaviour hypotheses CSV")->required();
  app.add_option("--theta-seeds", theta_seeds, "Strut-angle seeds CSV (degrees)");
  app.add_option("--output-dir", output_dir, "Directory for output artifacts");
  auto* o_max_gens = app.add_option("--max-gens", max_gens, "Generation cap");
  app.add_option("--seed", cfg.rng_seed, "RNG seed");
  auto* o_mu = app.add_option("--mu", mu, "Parent count");
  auto* o_lmin = app.add_option("--lambda-min", lambda_min, "Minimum offspring count");
  auto* o_lmax = app.add_option("--lambda-max", lambda_max, "Maximum offspring count");
  auto* o_sinit = app.add_option("--sigma-init", sigma_init, "Initial global step size");
  auto* o_smin = app.add_option("--sigma-min", sigma_min, "Stop when sigma falls below this");
  auto* o_pen = app.add_option("--penalty", penalty, "Penalty for invalid candidates");
  auto* o_form = app.add_option("--kappa-form", kappa_form, "cubic | rational")
                     ->check(CLI::IsMember({"cubic", "rational"}));
  auto* o_seeds = app.add_option("--eps1-seeds", eps1_seeds, "Newton seeds per hypothesis");
  app.add_option("--specimens", cfg.specimens, "Comma-separated specimen names")
      ->delimiter(',');
  auto* o_threads = app.add_option("--threads", threads, "Fitness evaluation threads");
  app.add_flag("--quiet", cfg.quiet, "Suppress console output");
  app.add_option("--lang", lang, "Console language")->check(CLI::IsMember({"es", "en"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ex::kExitOk : ex::kExitConfigError;
  }

  cfg.database = database;
  cfg.hypotheses = hypotheses;
  if (!theta_seeds.empty()) cfg.theta_seeds = theta_seeds;
  cfg.output_dir = output_dir;
  cfg.lang = lang == "en" ? ex::Lang::En : ex::Lang::Es;
  auto& o = cfg.overrides;
  if (o_max_gens->count()) o.max_gens = max_gens;
  if (o_mu->count()) o.mu = mu;
  if (o_lmin->count()) o.lambda_min = lambda_min;
  if (o_lmax->count()) o.lambda_max = lambda_max;
  if (o_sinit->count()) o.sigma_init = sigma_init;
  if (o_smin->count()) o.sigma_min = sigma_min;
  if (o_pen->count()) o.penalty = penalty;
  if (o_form->count()) o.kappa_form = kappafit::fitness::parse_kappa_form(kappa_form);
  if (o_seeds->count()) o.eps1_seeds = eps1_seeds;
  if (o_threads->count()) o.threads = threads;

  spdlog::set_level(cfg.quiet ? spdlog::level::err : spdlog::level::warn);

  const auto result = ex::run_experiment(cfg, std::cout);
  if (result.exit_code != ex::kExitOk) {
    std::cerr << "kappafit: " << result.error << '\n';
  }
  return result.exit_code;
}
