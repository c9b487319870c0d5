#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kappafit/shear_model.hpp"

namespace kappafit::synthetic {

/// Specimen built so that (eps1, theta) zeroes both equilibrium residuals.
struct Manufactured {
  shear::Specimen specimen;
  shear::HypothesisTriple hyp;
  double eps1 = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};

/// Completes `base` by solving the (linear) equilibrium equations for As_t and
/// As_x1 at the chosen root, with kappa = model(eps1). When
/// `match_stirrup_stress` is set, sigma_st_exp becomes the model stirrup
/// stress at the root. nullopt if the chain is infeasible there, an area
/// comes out non-positive, or the root fails the acceptance screens or the
/// regime check.
std::optional<Manufactured> manufacture(shear::Specimen base, const shear::HypothesisTriple& hyp,
                                        const shear::KappaModel& model, double eps1, double theta,
                                        bool match_stirrup_stress = true);

/// `count` random manufactured specimens with plausible beam proportions.
std::vector<Manufactured> random_manufactured(std::size_t count, std::uint64_t seed,
                                              const shear::KappaModel& model);

}  // namespace kappafit::synthetic
