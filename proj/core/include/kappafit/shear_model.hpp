#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kappafit::shear {

// Units throughout: N, mm, MPa; strains dimensionless; angles in radians.

inline constexpr double kSteelModulus = 200000.0;  // MPa

/// One tested beam: geometry, materials and the measured failure state.
struct Specimen {
  std::string name;
  double alpha = 0.0;    // concrete tension-stiffening adherence
  double alpha1 = 0.0;   // lower longitudinal bars
  double alpha2 = 0.0;   // upper longitudinal bars; 0 = no upper reinforcement
  double alpha_t = 0.0;  // stirrups
  double z = 0.0;        // lever arm
  double bw = 0.0;       // effective web width
  double As_x1 = 0.0;
  double As_x2 = 0.0;
  double As_t = 0.0;
  double s = 0.0;  // stirrup spacing
  double fy_x1 = 0.0;
  double fy_x2 = 0.0;
  double fy_t = 0.0;
  double fc = 0.0;
  double eps_c = 0.0;  // strain at fc
  double fctm = 0.0;
  double Ac_x1 = 0.0;
  double Ac_x2 = 0.0;
  double Ac_t = 0.0;
  double V = 0.0;             // ultimate shear force
  double sigma_st_exp = 0.0;  // measured stirrup stress at failure

  bool has_upper() const { return alpha2 != 0.0; }
};

/// Returns an empty string when `spec` satisfies the record invariants,
/// otherwise the name of the first offending field.
std::string invalid_field(const Specimen& spec);

struct DerivedMaterial {
  double Ec = 0.0;
  double eps_ctm = 0.0;
  double eps_y_x1 = 0.0;
  double eps_y_x2 = 0.0;
  double eps_y_t = 0.0;
  double Es = kSteelModulus;
};

/// Throws DataError for a non-positive fc.
DerivedMaterial derived_material(const Specimen& spec);

struct CubicKappa {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

struct RationalKappa {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Candidate degradation function kappa(eps1).
using KappaModel = std::variant<CubicKappa, RationalKappa>;

/// Cubic: a x^3 + b x^2 + c x + d with x = 1000 * eps1 (milli-strain).
/// Rational: a / (1 + b * eps1^c).
double eval_kappa(const KappaModel& model, double eps1);

enum class Regime { Elastic, Plastic };

/// Assumed regimes of (lower longitudinal, upper longitudinal, transverse) steel.
struct HypothesisTriple {
  Regime x1 = Regime::Elastic;
  Regime x2 = Regime::Elastic;
  Regime t = Regime::Elastic;

  /// Parses a three-letter string over {E, P}; nullopt on anything else.
  static std::optional<HypothesisTriple> parse(std::string_view text);
  std::string str() const;

  friend bool operator==(const HypothesisTriple&, const HypothesisTriple&) = default;
};

struct KappaLimits {
  double klim_x1 = 0.0;
  std::optional<double> klim_x2;
  double klim_t = 0.0;
  double klim1 = 0.0;
  double klim2_x1 = 0.0;
  std::optional<double> klim2_x2;
  double klim2_t = 0.0;
  double klim2 = 0.0;
};

/// Ratio klim2 / klim for a given yield strain.
double klim2_factor(double eps_y);

/// Throws DataError when a denominator vanishes.
KappaLimits kappa_limits(const Specimen& spec, const DerivedMaterial& mat);

/// Apparent yield strain: fixed point of
///   e = fy/Es - kappa * Ac * alpha * fct / (Es * As * (1 + sqrt(500 e)))
/// iterated from fy/Es. nullopt when the iteration leaves the positive axis
/// or does not converge within 200 steps.
std::optional<double> eps_max(double fy, double As, double Ac, double alpha, double fct,
                              double kappa, double Es = kSteelModulus);

struct StateVariables {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double f2max = 0.0;
  double eps2 = 0.0;
  double eps_t = 0.0;
  double eps_x = 0.0;
  double lambda_coef = 0.0;
  double sigma_s_x1 = 0.0;
  double sigma_s_x2 = 0.0;
  double sigma_s_t = 0.0;
  double kappa = 0.0;
};

enum class Infeasibility {
  OutOfDomain,       // eps1 <= 0 or theta outside (0, pi/2)
  Crushing,          // sigma2 exceeds f2max
  NegativeRadicand,  // plastic branch evaluated at negative strain
  NonFinite,
};

std::string_view to_string(Infeasibility why);

using ChainOutcome = std::variant<StateVariables, Infeasibility>;

/// Evaluates the cracked-concrete substitution chain at (eps1, theta) for the
/// given kappa and regime assumptions.
ChainOutcome state_chain(double eps1, double theta, const Specimen& spec,
                         const DerivedMaterial& mat, double kappa, const HypothesisTriple& hyp);

struct OmegaPsi {
  double omega = 0.0;  // longitudinal strain coefficient
  double psi = 0.0;    // transverse strain coefficient
};

/// Closed-form longitudinal/transverse strains from eps1, theta and the
/// compression coefficient lambda (eps2 = lambda * eps_c).
OmegaPsi omega_psi(double eps1, double theta, double lambda_coef, double eps_c);

struct Residuals {
  double r1 = 0.0;  // longitudinal equilibrium, N
  double r2 = 0.0;  // transverse equilibrium, N
};

Residuals residuals_from_state(const StateVariables& state, double theta, const Specimen& spec);

std::variant<Residuals, Infeasibility> residuals(double eps1, double theta, const Specimen& spec,
                                                 const DerivedMaterial& mat, double kappa,
                                                 const HypothesisTriple& hyp);

/// True when every reinforcement's strain at `state` lies on the side of its
/// apparent yield strain required by `hyp`.
bool regime_consistent(const StateVariables& state, const Specimen& spec,
                       const DerivedMaterial& mat, const HypothesisTriple& hyp);

struct SolveOptions {
  double tol_abs = 1e-6;  // N, on both residuals
  std::size_t max_iterations = 10000;
  std::size_t max_halvings = 30;
  double fd_step = 1e-8;  // relative central-difference step
};

struct SolveResult {
  double eps1 = 0.0;
  double theta = 0.0;
  StateVariables state;
  double sigma_st_model = 0.0;
  bool consistent = false;
  std::size_t iterations = 0;
};

/// Equispaced eps1 seeds eps_ctm + (min(eps_y_x1, eps_y_x2) + eps_y_t - eps_ctm) * j / (n - 1),
/// j = 0..n-1. Without upper reinforcement eps_y_x1 stands in for the minimum.
std::vector<double> eps1_seed_grid(const Specimen& spec, const DerivedMaterial& mat,
                                   std::size_t n_seeds);

/// Damped Newton from a single seed. Returns the root if it converged and
/// passed the eps1 >= eps_ctm and kappa <= klim2 screens; `consistent` on
/// the result reports the regime check.
std::optional<SolveResult> solve_from_seed(const Specimen& spec, const DerivedMaterial& mat,
                                           const KappaLimits& limits, const HypothesisTriple& hyp,
                                           const KappaModel& model, double eps1_seed,
                                           double theta_seed, const SolveOptions& options = {});

/// Runs solve_from_seed over the eps1 seed grid and returns the consistent
/// root whose stirrup stress is closest to the measured one.
std::optional<SolveResult> solve_hypothesis(const Specimen& spec, const DerivedMaterial& mat,
                                            const HypothesisTriple& hyp, const KappaModel& model,
                                            double theta_seed, std::size_t n_eps_seeds = 3,
                                            const SolveOptions& options = {});

}  // namespace kappafit::shear
