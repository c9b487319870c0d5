#include "kappafit/experiment.hpp"

#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kappafit/errors.hpp"
#include "kappafit/rng.hpp"

namespace kappafit::experiment {

VariantPreset variant_preset(int variant) {
  if (variant < 1 || variant > 4) {
    throw ConfigError("variant must be 1, 2, 3 or 4 (got " + std::to_string(variant) + ")");
  }
  VariantPreset p;
  auto& st = p.strategy;
  auto& fc = p.fitness;
  st.mu = 2;
  st.lambda_min = 12;
  st.lambda_max = 20;
  st.sigma_init = 1.2;
  st.sigma_min = 1e-8;
  st.max_gens = 300;
  fc.n_eps_seeds = 3;
  fc.no_solution_threshold = 1000.0;

  switch (variant) {
    case 1:
      fc.kappa_form = fitness::KappaForm::Cubic;
      fc.penalty = 1e6;
      fc.penalize_unsolved = false;
      st.mu = 4;
      st.adaptive_lambda = false;
      st.use_elite = false;
      st.use_restart = false;
      break;
    case 2:
      fc.kappa_form = fitness::KappaForm::Cubic;
      fc.penalty = 1e5;
      st.adaptive_lambda = false;
      st.use_elite = false;
      st.use_restart = false;
      break;
    case 3:
      fc.kappa_form = fitness::KappaForm::Cubic;
      fc.penalty = 1e5;
      break;
    case 4:
      fc.kappa_form = fitness::KappaForm::RationalSaturating;
      fc.penalty = 1e5;
      break;
  }
  st.penalty = fc.penalty;
  st.n = fitness::dimension(fc.kappa_form);
  return p;
}

VariantPreset resolve_settings(const RunConfig& cfg) {
  VariantPreset p = variant_preset(cfg.variant);
  const auto& o = cfg.overrides;
  auto& st = p.strategy;
  auto& fc = p.fitness;
  if (o.max_gens) st.max_gens = *o.max_gens;
  if (o.mu) st.mu = *o.mu;
  if (o.lambda_min) st.lambda_min = *o.lambda_min;
  if (o.lambda_max) st.lambda_max = *o.lambda_max;
  if (o.sigma_init) st.sigma_init = *o.sigma_init;
  if (o.sigma_min) st.sigma_min = *o.sigma_min;
  if (o.penalty) fc.penalty = *o.penalty;
  if (o.kappa_form) fc.kappa_form = *o.kappa_form;
  if (o.eps1_seeds) fc.n_eps_seeds = *o.eps1_seeds;
  if (o.threads) st.threads = *o.threads;
  st.penalty = fc.penalty;
  st.n = fitness::dimension(fc.kappa_form);
  st.rng_seed = cfg.rng_seed;
  st.validate();
  fc.validate();
  return p;
}

std::string generation_line(std::size_t generation, std::size_t mu, std::size_t lambda,
                            Lang lang) {
  return fmt::format("{} {}, mu={}, lambda={}", lang == Lang::Es ? "Generacion" : "Generation",
                     generation, mu, lambda);
}

std::string candidate_line(const shear::KappaModel& model, Lang lang) {
  const char* prefix = lang == Lang::Es ? "Polinomio candidato" : "Candidate function";
  if (const auto* c = std::get_if<shear::CubicKappa>(&model)) {
    return fmt::format("{} {:g}*x^3{:+g}*x^2{:+g}*x{:+g} (x=1000*ε1)", prefix, c->a, c->b, c->c,
                       c->d);
  }
  const auto& r = std::get<shear::RationalKappa>(model);
  return fmt::format("{} {:g}/(1+{:g}*ε1^{:g})", prefix, r.a, r.b, r.c);
}

std::string suma_line(double suma, Lang lang) {
  const double fit = fitness::normalized_fitness(suma);
  if (lang == Lang::Es) return fmt::format("Suma {:g}, Fitness Norm. {:g}", suma, fit);
  return fmt::format("Sum {:g}, Normalized fitness {:g}", suma, fit);
}

std::string no_solution_line(Lang lang) {
  return lang == Lang::Es ? "No se alcanza solucion." : "No solution reached.";
}

std::string mean_best_line(double mean, double best, Lang lang) {
  (void)lang;
  return fmt::format("f_Mean = {:g}, f_Best = {:g}", mean, best);
}

std::string restart_line(Lang lang) { return lang == Lang::Es ? "Reinicio.." : "Restart.."; }

void emit_report(std::ostream& out, const cmaes::EvolveResult& result,
                 const std::optional<shear::KappaModel>& best_model,
                 const std::optional<fitness::EvaluationReport>& best_report, Lang lang) {
  const bool es = lang == Lang::Es;
  out << (es ? "Generaciones: " : "Generations: ") << result.history.size() << '\n';
  out << (es ? "Parada: " : "Stop: ")
      << (result.stop == cmaes::StopReason::SigmaBelowMin ? "sigma < sigmaMin"
                                                           : (es ? "maxgens alcanzado"
                                                                 : "maxgens reached"))
      << '\n';
  if (!best_model || !best_report) {
    out << no_solution_line(lang) << '\n';
    return;
  }
  out << (es ? "Mejor candidato" : "Best candidate") << '\n';
  out << candidate_line(*best_model, lang) << '\n';
  out << io::describe_model(*best_model) << '\n';
  if (best_report->unsolved) {
    out << no_solution_line(lang) << '\n';
  } else {
    out << suma_line(best_report->suma, lang) << '\n';
  }
  std::size_t solved = 0;
  for (const auto& s : best_report->per_specimen) solved += s.solution ? 1 : 0;
  out << fmt::format("{}: {}/{}\n", es ? "Especimenes consistentes" : "Consistent specimens",
                     solved, best_report->per_specimen.size());
}

namespace {

std::vector<io::EliteRow> elite_rows(const cmaes::EliteArchive& elite,
                                     const fitness::FitnessConfig& fc) {
  std::vector<io::EliteRow> rows;
  for (const auto& e : elite.entries()) {
    if (auto model = fitness::decode_candidate(e.y, fc)) {
      rows.push_back({e.fitness, io::coefficients_of(*model)});
    }
  }
  return rows;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, std::ostream& console,
                         const cmaes::GenerationObserver& observer) {
  RunResult result;
  VariantPreset settings;
  try {
    settings = resolve_settings(cfg);
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfigError;
    result.error = e.what();
    return result;
  }

  std::vector<shear::Specimen> specimens;
  std::vector<fitness::SpecimenCase> cases;
  try {
    specimens = io::select_specimens(io::load_database(cfg.database), cfg.specimens);
    if (specimens.empty()) throw DataError("no specimens selected");
    const auto tables = io::load_hypotheses_and_seeds(cfg.hypotheses, cfg.theta_seeds, specimens);
    cases = io::build_cases(specimens, tables);
  } catch (const DataError& e) {
    result.exit_code = kExitDataError;
    result.error = e.what();
    return result;
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfigError;
    result.error = e.what();
    return result;
  }

  const auto& st = settings.strategy;
  const auto& fc = settings.fitness;
  Rng init_rng = Rng(cfg.rng_seed).split();
  cmaes::SearchPoint y_init(static_cast<Eigen::Index>(st.n));
  for (Eigen::Index i = 0; i < y_init.size(); ++i) y_init[i] = init_rng.uniform(0.1, 0.9);

  const auto objective = fitness::make_objective(cases, fc);
  const Lang lang = cfg.lang;
  auto on_generation = [&](const cmaes::GenerationRecord& rec,
                           const cmaes::Individual& gen_best) {
    if (observer) observer(rec, gen_best);
    if (cfg.quiet) return;
    console << generation_line(rec.generation, st.mu, rec.lambda, lang) << '\n';
    if (auto model = fitness::decode_candidate(gen_best.y, fc)) {
      console << candidate_line(*model, lang) << '\n';
    }
    if (gen_best.fitness >= fc.penalty) {
      console << no_solution_line(lang) << '\n';
    } else {
      console << suma_line(gen_best.fitness, lang) << '\n';
    }
    console << mean_best_line(rec.mean_fitness, rec.best_fitness, lang) << '\n';
    if (rec.restarted) console << restart_line(lang) << '\n';
  };

  result.evolve = cmaes::evolve(objective, st, y_init, on_generation);
  const auto& evo = *result.evolve;

  io::RunArtifacts artifacts;
  artifacts.history = evo.history;
  artifacts.elite = elite_rows(evo.elite, fc);
  artifacts.form = fc.kappa_form;
  artifacts.specimens = specimens;
  if (auto model = fitness::decode_candidate(evo.best.y, fc)) {
    artifacts.best_model = *model;
    artifacts.best_report = fitness::evaluate_model(*model, cases, fc);
  }
  if (!cfg.quiet) {
    emit_report(console, evo, artifacts.best_model, artifacts.best_report, lang);
  }

  try {
    io::write_outputs(cfg.output_dir, artifacts);
  } catch (const IoError& e) {
    result.exit_code = kExitIoError;
    result.error = e.what();
  }
  result.artifacts = std::move(artifacts);
  return result;
}

}  // namespace kappafit::experiment
