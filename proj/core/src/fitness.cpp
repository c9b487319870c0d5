#include "kappafit/fitness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "kappafit/errors.hpp"

namespace kappafit::fitness {

double coef(double x) { return std::tan(std::numbers::pi * x - std::numbers::pi / 2.0); }

double coord(double y) { return std::atan(y) / std::numbers::pi + 0.5; }

std::size_t dimension(KappaForm form) { return form == KappaForm::Cubic ? 4 : 3; }

std::string_view to_string(KappaForm form) {
  return form == KappaForm::Cubic ? "cubic" : "rational";
}

std::optional<KappaForm> parse_kappa_form(std::string_view text) {
  if (text == "cubic") return KappaForm::Cubic;
  if (text == "rational") return KappaForm::RationalSaturating;
  return std::nullopt;
}

void FitnessConfig::validate() const {
  if (!(penalty > 0.0) || !std::isfinite(penalty)) throw ConfigError("penalty must be positive");
  if (n_eps_seeds < 2) throw ConfigError("eps1 seed count must be >= 2");
  if (!(no_solution_threshold > 0.0)) throw ConfigError("no-solution threshold must be positive");
  if (penalty / 100.0 < no_solution_threshold) {
    throw ConfigError("penalty / 100 must be >= the no-solution threshold");
  }
}

SpecimenCase make_case(shear::Specimen specimen, std::vector<shear::HypothesisTriple> hypotheses,
                       std::vector<double> theta_seeds_rad) {
  if (hypotheses.empty()) {
    throw DataError("Specimen " + specimen.name + " has no valid behaviour hypotheses.");
  }
  if (theta_seeds_rad.size() < hypotheses.size()) {
    throw DataError("Specimen " + specimen.name + " has fewer theta seeds than hypotheses.");
  }
  theta_seeds_rad.resize(hypotheses.size());
  for (double seed : theta_seeds_rad) {
    if (!(seed > 0.0 && seed < std::numbers::pi / 2.0)) {
      throw DataError("Specimen " + specimen.name + " has a theta seed outside (0, 90) degrees.");
    }
  }
  if (auto field = shear::invalid_field(specimen); !field.empty()) {
    throw DataError("Specimen " + specimen.name + ": invalid field " + field);
  }
  SpecimenCase c;
  c.material = shear::derived_material(specimen);
  shear::kappa_limits(specimen, c.material);  // surfaces zero denominators at load time
  c.specimen = std::move(specimen);
  c.hypotheses = std::move(hypotheses);
  c.theta_seeds = std::move(theta_seeds_rad);
  return c;
}

std::optional<shear::KappaModel> decode_candidate(const cmaes::SearchPoint& y,
                                                  const FitnessConfig& cfg) {
  if (static_cast<std::size_t>(y.size()) != dimension(cfg.kappa_form)) return std::nullopt;
  std::array<double, 4> k{};
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]) || y[i] == std::round(y[i])) return std::nullopt;
    k[static_cast<std::size_t>(i)] = coef(y[i]);
    if (!std::isfinite(k[static_cast<std::size_t>(i)])) return std::nullopt;
  }
  if (cfg.kappa_form == KappaForm::Cubic) {
    return shear::CubicKappa{k[0], k[1], k[2], k[3]};
  }
  const double at_unit = k[0] / (1.0 + k[1]);
  if (!std::isfinite(at_unit) || at_unit >= 1.0) return std::nullopt;
  return shear::RationalKappa{k[0], k[1], k[2]};
}

cmaes::SearchPoint encode_model(const shear::KappaModel& model) {
  if (const auto* c = std::get_if<shear::CubicKappa>(&model)) {
    cmaes::SearchPoint y(4);
    y << coord(c->a), coord(c->b), coord(c->c), coord(c->d);
    return y;
  }
  const auto& r = std::get<shear::RationalKappa>(model);
  cmaes::SearchPoint y(3);
  y << coord(r.a), coord(r.b), coord(r.c);
  return y;
}

EvaluationReport evaluate_model(const shear::KappaModel& model, std::span<const SpecimenCase> db,
                                const FitnessConfig& cfg) {
  EvaluationReport report;
  report.per_specimen.reserve(db.size());
  double total = 0.0;
  for (const auto& c : db) {
    SpecimenScore score;
    score.name = c.specimen.name;
    score.score = cfg.penalty;
    for (std::size_t h = 0; h < c.hypotheses.size(); ++h) {
      auto sol = shear::solve_hypothesis(c.specimen, c.material, c.hypotheses[h], model,
                                         c.theta_seeds[h], cfg.n_eps_seeds, cfg.solve);
      if (!sol) continue;
      const double diff = sol->sigma_st_model - c.specimen.sigma_st_exp;
      const double sq = std::min(diff * diff, cfg.penalty);
      if (!score.solution || sq < score.score) {
        score.score = sq;
        score.best_hypothesis = c.hypotheses[h];
        score.solution = std::move(sol);
      }
    }
    total += score.score;
    report.per_specimen.push_back(std::move(score));
  }
  report.suma = db.empty() ? 0.0 : total / (static_cast<double>(db.size()) * 100.0);
  report.fit = normalized_fitness(report.suma);
  report.unsolved = report.suma >= cfg.no_solution_threshold;
  return report;
}

double objective_suma(const shear::KappaModel& model, std::span<const SpecimenCase> db,
                      const FitnessConfig& cfg) {
  const auto report = evaluate_model(model, db, cfg);
  if (report.unsolved && cfg.penalize_unsolved) {
    spdlog::debug("candidate reached no solution (suma {})", report.suma);
    return cfg.penalty;
  }
  return report.suma;
}

double normalized_fitness(double suma) { return std::max(0.0, 1.0 - suma / 1000.0); }

cmaes::Objective make_objective(std::span<const SpecimenCase> db, const FitnessConfig& cfg) {
  return [db, cfg](const cmaes::SearchPoint& y) {
    const auto model = decode_candidate(y, cfg);
    if (!model) return cfg.penalty;
    return objective_suma(*model, db, cfg);
  };
}

}  // namespace kappafit::fitness
