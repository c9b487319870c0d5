#include "kappafit/synthetic.hpp"

#include <cmath>
#include <string>

#include "kappafit/rng.hpp"

namespace kappafit::synthetic {

namespace {

double stiffening(double strain) { return 1.0 / (1.0 + std::sqrt(500.0 * strain)); }

}  // namespace

std::optional<Manufactured> manufacture(shear::Specimen base, const shear::HypothesisTriple& hyp,
                                        const shear::KappaModel& model, double eps1, double theta,
                                        bool match_stirrup_stress) {
  const double kappa = shear::eval_kappa(model, eps1);
  if (!std::isfinite(kappa)) return std::nullopt;

  // The steel-independent part of the chain does not depend on As; evaluate
  // it with placeholder areas under an all-elastic assumption.
  base.As_x1 = 1.0;
  base.As_t = 1.0;
  const auto mat = shear::derived_material(base);
  const shear::HypothesisTriple elastic{};
  auto chain = shear::state_chain(eps1, theta, base, mat, kappa, elastic);
  const auto* st = std::get_if<shear::StateVariables>(&chain);
  if (st == nullptr) return std::nullopt;

  const double sin2 = std::pow(std::sin(theta), 2);
  const double cos2 = std::pow(std::cos(theta), 2);
  const double transverse = (st->sigma2 * sin2 - st->sigma1 * cos2) * base.bw * base.s;
  const double fct = base.fctm;

  double As_t = 0.0;
  if (hyp.t == shear::Regime::Elastic) {
    As_t = transverse / (mat.Es * st->eps_t);
  } else {
    if (st->eps_t < 0.0) return std::nullopt;
    As_t = (transverse + kappa * base.Ac_t * base.alpha_t * fct * stiffening(st->eps_t)) / base.fy_t;
  }

  double upper_force = 0.0;
  if (base.has_upper()) {
    double stress = 0.0;
    if (hyp.x2 == shear::Regime::Elastic) {
      stress = mat.Es * st->eps_x;
    } else {
      if (st->eps_x < 0.0) return std::nullopt;
      stress = base.fy_x2 -
               kappa * (base.Ac_x2 / base.As_x2) * base.alpha2 * fct * stiffening(st->eps_x);
    }
    upper_force = base.As_x2 * stress;
  }
  const double longitudinal =
      base.V / std::tan(theta) - st->sigma1 * base.bw * base.z - upper_force;
  double As_x1 = 0.0;
  if (hyp.x1 == shear::Regime::Elastic) {
    As_x1 = longitudinal / (mat.Es * st->eps_x);
  } else {
    if (st->eps_x < 0.0) return std::nullopt;
    As_x1 = (longitudinal + kappa * base.Ac_x1 * base.alpha1 * fct * stiffening(st->eps_x)) /
            base.fy_x1;
  }
  if (!(std::isfinite(As_t) && As_t > 0.0 && std::isfinite(As_x1) && As_x1 > 0.0)) {
    return std::nullopt;
  }
  base.As_t = As_t;
  base.As_x1 = As_x1;

  auto full = shear::state_chain(eps1, theta, base, mat, kappa, hyp);
  const auto* root = std::get_if<shear::StateVariables>(&full);
  if (root == nullptr) return std::nullopt;
  if (match_stirrup_stress) {
    if (!(root->sigma_s_t > 0.0)) return std::nullopt;
    base.sigma_st_exp = root->sigma_s_t;
  }
  if (!shear::invalid_field(base).empty()) return std::nullopt;

  const auto limits = shear::kappa_limits(base, mat);
  if (eps1 < mat.eps_ctm || kappa > limits.klim2) return std::nullopt;
  if (!shear::regime_consistent(*root, base, mat, hyp)) return std::nullopt;

  return Manufactured{std::move(base), hyp, eps1, theta, kappa};
}

std::vector<Manufactured> random_manufactured(std::size_t count, std::uint64_t seed,
                                              const shear::KappaModel& model) {
  Rng rng(seed);
  std::vector<Manufactured> out;
  const shear::HypothesisTriple hyps[] = {
      *shear::HypothesisTriple::parse("EEP"),
      *shear::HypothesisTriple::parse("EEE"),
  };
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 2000; ++attempt) {
    shear::Specimen b;
    b.name = "SYN-" + std::to_string(out.size() + 1);
    b.fc = rng.uniform(25.0, 60.0);
    b.eps_c = 0.002;
    b.fctm = 0.3 * std::pow(b.fc, 2.0 / 3.0);
    b.alpha = 1.0;
    b.alpha1 = 1.0;
    b.alpha_t = 1.0;
    b.bw = rng.uniform(100.0, 300.0);
    b.z = rng.uniform(2.0, 3.5) * b.bw;
    b.s = rng.uniform(100.0, 250.0);
    b.fy_x1 = rng.uniform(450.0, 600.0);
    b.fy_t = rng.uniform(400.0, 550.0);
    b.Ac_x1 = b.bw * rng.uniform(80.0, 150.0);
    b.Ac_t = b.bw * b.s * rng.uniform(0.05, 0.15);
    if (rng.uniform01() < 0.5) {
      b.alpha2 = 1.0;
      b.As_x2 = rng.uniform(150.0, 400.0);
      b.fy_x2 = rng.uniform(450.0, 600.0);
      b.Ac_x2 = b.bw * rng.uniform(40.0, 80.0);
    }
    const auto& hyp = hyps[rng.uniform01() < 0.7 ? 0 : 1];
    const double eps1 = rng.uniform(0.002, 0.008);
    const double theta = rng.uniform(0.5, 0.85);

    // Shear force from a target concrete compression utilisation.
    const double f2max = std::min(b.fc, b.fc / (0.8 + 170.0 * eps1));
    const double sigma1 = b.alpha * b.fctm * stiffening(eps1);
    const double sigma2 = rng.uniform(0.3, 0.75) * f2max;
    const double tan_t = std::tan(theta);
    b.V = (sigma2 + sigma1) * b.z * b.bw / (tan_t + 1.0 / tan_t);
    b.sigma_st_exp = 1.0;

    if (auto m = manufacture(b, hyp, model, eps1, theta)) out.push_back(std::move(*m));
  }
  return out;
}

}  // namespace kappafit::synthetic
