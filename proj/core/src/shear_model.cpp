#include "kappafit/shear_model.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "kappafit/errors.hpp"

namespace kappafit::shear {

namespace {

// Tension-stiffening attenuation 1 / (1 + sqrt(500 e)).
double stiffening(double strain) { return 1.0 / (1.0 + std::sqrt(500.0 * strain)); }

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string invalid_field(const Specimen& spec) {
  if (spec.name.empty()) return "name";
  const std::array<std::pair<const char*, double>, 16> required{{
      {"alpha", spec.alpha},   {"alpha1", spec.alpha1},     {"alpha_t", spec.alpha_t},
      {"z", spec.z},           {"bw", spec.bw},             {"As_x1", spec.As_x1},
      {"As_t", spec.As_t},     {"s", spec.s},               {"fy_x1", spec.fy_x1},
      {"fy_t", spec.fy_t},     {"fc", spec.fc},             {"eps_c", spec.eps_c},
      {"fctm", spec.fctm},     {"Ac_x1", spec.Ac_x1},       {"Ac_t", spec.Ac_t},
      {"V", spec.V},
  }};
  for (const auto& [field, value] : required) {
    if (!positive(value)) return field;
  }
  if (!positive(spec.sigma_st_exp)) return "sigma_st_exp";
  if (!std::isfinite(spec.alpha2) || spec.alpha2 < 0.0) return "alpha2";
  if (spec.has_upper()) {
    if (!positive(spec.As_x2)) return "As_x2";
    if (!positive(spec.fy_x2)) return "fy_x2";
    if (!positive(spec.Ac_x2)) return "Ac_x2";
  } else {
    if (!std::isfinite(spec.As_x2) || spec.As_x2 < 0.0) return "As_x2";
    if (!std::isfinite(spec.fy_x2) || spec.fy_x2 < 0.0) return "fy_x2";
    if (!std::isfinite(spec.Ac_x2) || spec.Ac_x2 < 0.0) return "Ac_x2";
  }
  return {};
}

DerivedMaterial derived_material(const Specimen& spec) {
  if (!positive(spec.fc)) {
    throw DataError("specimen " + spec.name + ": fc must be positive");
  }
  DerivedMaterial mat;
  mat.Ec = 8500.0 * std::cbrt(spec.fc + 8.0);
  mat.eps_ctm = spec.fctm / mat.Ec;
  mat.eps_y_x1 = spec.fy_x1 / mat.Es;
  mat.eps_y_x2 = spec.fy_x2 / mat.Es;
  mat.eps_y_t = spec.fy_t / mat.Es;
  return mat;
}

double eval_kappa(const KappaModel& model, double eps1) {
  if (const auto* cubic = std::get_if<CubicKappa>(&model)) {
    const double x = eps1 * 1000.0;
    return ((cubic->a * x + cubic->b) * x + cubic->c) * x + cubic->d;
  }
  const auto& r = std::get<RationalKappa>(model);
  return r.a / (1.0 + r.b * std::pow(eps1, r.c));
}

std::optional<HypothesisTriple> HypothesisTriple::parse(std::string_view text) {
  if (text.size() != 3) return std::nullopt;
  std::array<Regime, 3> regimes{};
  for (std::size_t i = 0; i < 3; ++i) {
    switch (text[i]) {
      case 'E': regimes[i] = Regime::Elastic; break;
      case 'P': regimes[i] = Regime::Plastic; break;
      default: return std::nullopt;
    }
  }
  return HypothesisTriple{regimes[0], regimes[1], regimes[2]};
}

std::string HypothesisTriple::str() const {
  auto letter = [](Regime r) { return r == Regime::Elastic ? 'E' : 'P'; };
  return {letter(x1), letter(x2), letter(t)};
}

double klim2_factor(double eps_y) {
  return (4500.0 * eps_y + std::pow(1.0 + 1500.0 * eps_y, 1.5) - 1.0) / (6750.0 * eps_y);
}

KappaLimits kappa_limits(const Specimen& spec, const DerivedMaterial& mat) {
  auto limit = [&](double As, double fy, double alpha, double Ac, const char* which) {
    const double denom = alpha * Ac * spec.fctm;
    if (!(denom != 0.0) || !std::isfinite(denom)) {
      throw DataError("specimen " + spec.name + ": zero denominator in kappa limit (" + which + ")");
    }
    return As * fy / denom;
  };
  auto factor = [&](double eps_y, const char* which) {
    if (!(eps_y > 0.0)) {
      throw DataError("specimen " + spec.name + ": zero yield strain (" + which + ")");
    }
    return klim2_factor(eps_y);
  };

  KappaLimits k;
  k.klim_x1 = limit(spec.As_x1, spec.fy_x1, spec.alpha1, spec.Ac_x1, "x1");
  k.klim_t = limit(spec.As_t, spec.fy_t, spec.alpha_t, spec.Ac_t, "t");
  k.klim2_x1 = k.klim_x1 * factor(mat.eps_y_x1, "x1");
  k.klim2_t = k.klim_t * factor(mat.eps_y_t, "t");
  k.klim1 = std::min(k.klim_t, k.klim_x1);
  k.klim2 = std::min(k.klim2_t, k.klim2_x1);
  if (spec.has_upper()) {
    k.klim_x2 = limit(spec.As_x2, spec.fy_x2, spec.alpha2, spec.Ac_x2, "x2");
    k.klim2_x2 = *k.klim_x2 * factor(mat.eps_y_x2, "x2");
    k.klim1 = std::min(k.klim1, *k.klim_x2);
    k.klim2 = std::min(k.klim2, *k.klim2_x2);
  }
  return k;
}

std::optional<double> eps_max(double fy, double As, double Ac, double alpha, double fct,
                              double kappa, double Es) {
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 200;
  const double eps_y = fy / Es;
  const double coeff = kappa * Ac * alpha * fct / (Es * As);
  if (!std::isfinite(eps_y) || !std::isfinite(coeff)) return std::nullopt;

  double e = eps_y;
  for (int it = 0; it < kMaxIter; ++it) {
    const double next = eps_y - coeff * stiffening(e);
    if (!std::isfinite(next) || next < 0.0) return std::nullopt;
    if (std::abs(next - e) <= kTol) return next;
    e = next;
  }
  return std::nullopt;
}

std::string_view to_string(Infeasibility why) {
  switch (why) {
    case Infeasibility::OutOfDomain: return "out of domain";
    case Infeasibility::Crushing: return "concrete crushing";
    case Infeasibility::NegativeRadicand: return "negative radicand";
    case Infeasibility::NonFinite: return "non-finite value";
  }
  return "unknown";
}

ChainOutcome state_chain(double eps1, double theta, const Specimen& spec,
                         const DerivedMaterial& mat, double kappa, const HypothesisTriple& hyp) {
  if (!(eps1 > 0.0) || !(theta > 0.0) || !(theta < std::numbers::pi / 2.0) ||
      !std::isfinite(eps1)) {
    return Infeasibility::OutOfDomain;
  }
  if (!std::isfinite(kappa)) return Infeasibility::NonFinite;

  StateVariables st;
  st.kappa = kappa;
  const double tan_t = std::tan(theta);
  const double tan2 = tan_t * tan_t;

  st.sigma1 = spec.alpha * spec.fctm * stiffening(eps1);
  st.sigma2 = (tan_t + 1.0 / tan_t) * spec.V / (spec.z * spec.bw) - st.sigma1;
  st.f2max = std::min(spec.fc, spec.fc / (0.8 + 170.0 * eps1));
  const double ratio = st.sigma2 / st.f2max;
  if (ratio > 1.0) return Infeasibility::Crushing;
  st.lambda_coef = 1.0 - std::sqrt(1.0 - ratio);
  st.eps2 = st.lambda_coef * spec.eps_c;
  st.eps_t = (st.eps2 * tan2 + eps1) / (tan2 + 1.0);
  st.eps_x = eps1 + st.eps2 - st.eps_t;

  auto steel = [&](Regime regime, double strain, double fy, double Ac, double As, double alpha,
                   double& out) {
    if (regime == Regime::Elastic) {
      out = mat.Es * strain;
      return true;
    }
    if (strain < 0.0) return false;
    out = fy - kappa * (Ac / As) * alpha * spec.fctm * stiffening(strain);
    return true;
  };
  if (!steel(hyp.x1, st.eps_x, spec.fy_x1, spec.Ac_x1, spec.As_x1, spec.alpha1, st.sigma_s_x1)) {
    return Infeasibility::NegativeRadicand;
  }
  if (spec.has_upper()) {
    if (!steel(hyp.x2, st.eps_x, spec.fy_x2, spec.Ac_x2, spec.As_x2, spec.alpha2,
               st.sigma_s_x2)) {
      return Infeasibility::NegativeRadicand;
    }
  } else {
    st.sigma_s_x2 = 0.0;
  }
  if (!steel(hyp.t, st.eps_t, spec.fy_t, spec.Ac_t, spec.As_t, spec.alpha_t, st.sigma_s_t)) {
    return Infeasibility::NegativeRadicand;
  }

  const std::array<double, 10> all{st.sigma1, st.sigma2,     st.f2max,      st.eps2,
                                   st.eps_t,  st.eps_x,      st.lambda_coef, st.sigma_s_x1,
                                   st.sigma_s_x2, st.sigma_s_t};
  for (double v : all) {
    if (!std::isfinite(v)) return Infeasibility::NonFinite;
  }
  return st;
}

OmegaPsi omega_psi(double eps1, double theta, double lambda_coef, double eps_c) {
  const double tan2 = std::pow(std::tan(theta), 2);
  return {(eps1 * tan2 + lambda_coef * eps_c) / (1.0 + tan2),
          (eps1 + lambda_coef * eps_c * tan2) / (1.0 + tan2)};
}

Residuals residuals_from_state(const StateVariables& st, double theta, const Specimen& spec) {
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  Residuals r;
  r.r1 = spec.As_x1 * st.sigma_s_x1 + spec.As_x2 * st.sigma_s_x2 - spec.V / std::tan(theta) +
         st.sigma1 * spec.bw * spec.z;
  r.r2 = st.sigma_s_t * spec.As_t -
         (st.sigma2 * sin_t * sin_t - st.sigma1 * cos_t * cos_t) * spec.bw * spec.s;
  return r;
}

std::variant<Residuals, Infeasibility> residuals(double eps1, double theta, const Specimen& spec,
                                                 const DerivedMaterial& mat, double kappa,
                                                 const HypothesisTriple& hyp) {
  auto chain = state_chain(eps1, theta, spec, mat, kappa, hyp);
  if (const auto* why = std::get_if<Infeasibility>(&chain)) return *why;
  return residuals_from_state(std::get<StateVariables>(chain), theta, spec);
}

bool regime_consistent(const StateVariables& st, const Specimen& spec, const DerivedMaterial& mat,
                       const HypothesisTriple& hyp) {
  auto check = [&](Regime regime, double strain, double fy, double As, double Ac, double alpha) {
    const auto limit = eps_max(fy, As, Ac, alpha, spec.fctm, st.kappa, mat.Es);
    if (!limit) return false;
    return regime == Regime::Elastic ? strain <= *limit : strain > *limit;
  };
  if (!check(hyp.x1, st.eps_x, spec.fy_x1, spec.As_x1, spec.Ac_x1, spec.alpha1)) return false;
  if (spec.has_upper() &&
      !check(hyp.x2, st.eps_x, spec.fy_x2, spec.As_x2, spec.Ac_x2, spec.alpha2)) {
    return false;
  }
  return check(hyp.t, st.eps_t, spec.fy_t, spec.As_t, spec.Ac_t, spec.alpha_t);
}

std::vector<double> eps1_seed_grid(const Specimen& spec, const DerivedMaterial& mat,
                                   std::size_t n_seeds) {
  if (n_seeds < 2) throw ConfigError("at least two eps1 seeds are required");
  const double min_long = spec.has_upper() ? std::min(mat.eps_y_x1, mat.eps_y_x2) : mat.eps_y_x1;
  const double span = min_long + mat.eps_y_t - mat.eps_ctm;
  std::vector<double> seeds(n_seeds);
  for (std::size_t j = 0; j < n_seeds; ++j) {
    seeds[j] = mat.eps_ctm + span * static_cast<double>(j) / static_cast<double>(n_seeds - 1);
  }
  return seeds;
}

namespace {

using Point = std::array<double, 2>;

struct Evaluation {
  Residuals r;
  StateVariables state;
};

std::optional<Evaluation> evaluate(const Point& x, const Specimen& spec, const DerivedMaterial& mat,
                                   const HypothesisTriple& hyp, const KappaModel& model) {
  const double kappa = eval_kappa(model, x[0]);
  auto chain = state_chain(x[0], x[1], spec, mat, kappa, hyp);
  const auto* st = std::get_if<StateVariables>(&chain);
  if (st == nullptr) return std::nullopt;
  Evaluation ev{residuals_from_state(*st, x[1], spec), *st};
  if (!std::isfinite(ev.r.r1) || !std::isfinite(ev.r.r2)) return std::nullopt;
  return ev;
}

double norm(const Residuals& r) { return std::hypot(r.r1, r.r2); }

}  // namespace

std::optional<SolveResult> solve_from_seed(const Specimen& spec, const DerivedMaterial& mat,
                                           const KappaLimits& limits, const HypothesisTriple& hyp,
                                           const KappaModel& model, double eps1_seed,
                                           double theta_seed, const SolveOptions& options) {
  Point x{eps1_seed, theta_seed};
  auto current = evaluate(x, spec, mat, hyp, model);
  if (!current) return std::nullopt;

  bool converged = false;
  std::size_t iter = 0;
  for (; iter <= options.max_iterations; ++iter) {
    const Residuals& r = current->r;
    if (std::abs(r.r1) < options.tol_abs && std::abs(r.r2) < options.tol_abs) {
      converged = true;
      break;
    }
    if (iter == options.max_iterations) break;

    // Central-difference Jacobian, one-sided where a probe leaves the domain.
    double J[2][2];
    for (int k = 0; k < 2; ++k) {
      const double h = options.fd_step * std::abs(x[k]);
      Point xp = x;
      Point xm = x;
      xp[k] += h;
      xm[k] -= h;
      const auto fp = evaluate(xp, spec, mat, hyp, model);
      const auto fm = evaluate(xm, spec, mat, hyp, model);
      Residuals hi = r;
      Residuals lo = r;
      double width = 0.0;
      if (fp && fm) {
        hi = fp->r;
        lo = fm->r;
        width = xp[k] - xm[k];
      } else if (fp) {
        hi = fp->r;
        width = xp[k] - x[k];
      } else if (fm) {
        lo = fm->r;
        width = x[k] - xm[k];
      } else {
        return std::nullopt;
      }
      J[0][k] = (hi.r1 - lo.r1) / width;
      J[1][k] = (hi.r2 - lo.r2) / width;
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!std::isfinite(det) || det == 0.0) return std::nullopt;
    const Point step{(-J[1][1] * r.r1 + J[0][1] * r.r2) / det,
                     (J[1][0] * r.r1 - J[0][0] * r.r2) / det};

    const double base = norm(r);
    double t = 1.0;
    bool accepted = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const Point trial{x[0] + t * step[0], x[1] + t * step[1]};
      if (trial == x) break;
      auto ev = evaluate(trial, spec, mat, hyp, model);
      if (ev && norm(ev->r) < base) {
        x = trial;
        current = std::move(ev);
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
  }
  if (!converged) return std::nullopt;

  const double kappa = current->state.kappa;
  if (x[0] < mat.eps_ctm || kappa > limits.klim2) return std::nullopt;

  SolveResult result;
  result.eps1 = x[0];
  result.theta = x[1];
  result.state = current->state;
  result.sigma_st_model = current->state.sigma_s_t;
  result.consistent = regime_consistent(current->state, spec, mat, hyp);
  result.iterations = iter;
  return result;
}

std::optional<SolveResult> solve_hypothesis(const Specimen& spec, const DerivedMaterial& mat,
                                            const HypothesisTriple& hyp, const KappaModel& model,
                                            double theta_seed, std::size_t n_eps_seeds,
                                            const SolveOptions& options) {
  const KappaLimits limits = kappa_limits(spec, mat);
  std::optional<SolveResult> best;
  double best_err = 0.0;
  for (double seed : eps1_seed_grid(spec, mat, n_eps_seeds)) {
    auto res = solve_from_seed(spec, mat, limits, hyp, model, seed, theta_seed, options);
    if (!res || !res->consistent) continue;
    const double err = std::abs(res->sigma_st_model - spec.sigma_st_exp);
    if (!best || err < best_err) {
      best = std::move(res);
      best_err = err;
    }
  }
  return best;
}

}  // namespace kappafit::shear
