#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kappafit/cmaes.hpp"
#include "kappafit/shear_model.hpp"

namespace kappafit::fitness {

/// Maps the unit interval onto the real line: tan(pi x - pi/2).
double coef(double x);
/// Inverse of coef, into (0, 1).
double coord(double y);

enum class KappaForm { Cubic, RationalSaturating };

std::size_t dimension(KappaForm form);
std::string_view to_string(KappaForm form);
std::optional<KappaForm> parse_kappa_form(std::string_view text);

struct FitnessConfig {
  double penalty = 1e5;
  KappaForm kappa_form = KappaForm::RationalSaturating;
  std::size_t n_eps_seeds = 3;
  double no_solution_threshold = 1000.0;
  // When false the aggregate is returned as-is even past the threshold;
  // invalid attempts still score `penalty` individually.
  bool penalize_unsolved = true;
  shear::SolveOptions solve;

  void validate() const;
};

/// A specimen with everything needed to score it, fixed at load time.
struct SpecimenCase {
  shear::Specimen specimen;
  shear::DerivedMaterial material;
  std::vector<shear::HypothesisTriple> hypotheses;
  std::vector<double> theta_seeds;  // radians, aligned with hypotheses
};

/// Validates alignment of hypotheses and seeds; throws DataError.
SpecimenCase make_case(shear::Specimen specimen, std::vector<shear::HypothesisTriple> hypotheses,
                       std::vector<double> theta_seeds_rad);

/// Coefficients via coef() per coordinate. nullopt for a pole, a non-finite
/// coefficient, a wrong length, or a rational candidate with a/(1+b) >= 1.
std::optional<shear::KappaModel> decode_candidate(const cmaes::SearchPoint& y,
                                                  const FitnessConfig& cfg);

/// Inverse of decode_candidate for finite coefficients.
cmaes::SearchPoint encode_model(const shear::KappaModel& model);

struct SpecimenScore {
  std::string name;
  std::optional<shear::HypothesisTriple> best_hypothesis;
  std::optional<shear::SolveResult> solution;
  double score = 0.0;  // squared stress error (MPa^2) or penalty
};

struct EvaluationReport {
  double suma = 0.0;
  double fit = 0.0;
  bool unsolved = false;  // suma reached the no-solution threshold
  std::vector<SpecimenScore> per_specimen;
};

EvaluationReport evaluate_model(const shear::KappaModel& model, std::span<const SpecimenCase> db,
                                const FitnessConfig& cfg);

/// Objective value of a decoded model: suma, or the penalty when unsolved.
double objective_suma(const shear::KappaModel& model, std::span<const SpecimenCase> db,
                      const FitnessConfig& cfg);

/// max(0, 1 - suma / 1000).
double normalized_fitness(double suma);

/// Search-space objective over `db`; the database must outlive the result.
cmaes::Objective make_objective(std::span<const SpecimenCase> db, const FitnessConfig& cfg);

}  // namespace kappafit::fitness
