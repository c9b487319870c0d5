#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kappafit/rng.hpp"

namespace kappafit::cmaes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Unconstrained coordinates of a candidate solution.
using SearchPoint = Vector;

/// Minimized objective. Must be callable concurrently from several workers.
using Objective = std::function<double(const SearchPoint&)>;

/// One population member: y = parent + w, w = sigma * sqrtC * z.
struct Individual {
  double fitness = std::numeric_limits<double>::infinity();
  SearchPoint y;
  Vector w;
  Vector z;
};

struct StrategyConfig {
  std::size_t n = 3;
  std::size_t mu = 2;
  std::size_t lambda_min = 12;
  std::size_t lambda_max = 20;
  double sigma_init = 1.2;
  double sigma_min = 1e-8;
  std::size_t max_gens = 300;
  double penalty = 1e5;
  std::size_t elite_capacity = 16;
  std::size_t elite_reinject_count = 5;
  std::uint64_t rng_seed = 1;
  double stagnation_tol = 1e-12;

  // Mechanism switches; all on reproduces the full adaptive strategy.
  bool adaptive_lambda = true;
  bool use_elite = true;
  bool use_restart = true;

  // Worker threads for fitness evaluation within a generation.
  std::size_t threads = 1;

  /// Throws ConfigError when the invariants between fields do not hold.
  void validate() const;
};

/// Best solutions seen so far, sorted ascending by fitness.
class EliteArchive {
 public:
  explicit EliteArchive(std::size_t capacity = 16) : capacity_(capacity) {}

  /// Inserts `candidate` unless it is invalid (fitness >= penalty, non-finite)
  /// or already present (same coordinates). Evicts the worst entry on
  /// overflow. Returns true if the archive changed.
  bool merge(const Individual& candidate, double penalty);

  std::span<const Individual> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<Individual> entries_;
  std::size_t capacity_;
};

struct StrategyState {
  std::size_t generation = 0;
  SearchPoint y_init;
  SearchPoint y_parent;  // distribution mean
  double sigma = 1.0;
  Matrix C;
  Matrix sqrtC;  // lower Cholesky factor, sqrtC * sqrtC^T = C
  Vector s;        // search path
  Vector s_sigma;  // step-size path
  double tau = 1.0;
  double tau_c = 1.0;
  double tau_sigma = 1.0;
  EliteArchive elite;
  Individual best;
  double prev_mean_fitness = std::numeric_limits<double>::quiet_NaN();

  // The offspring schedule counts generations from this point; moved forward
  // on restart so the count starts again at lambda_max.
  std::size_t lambda_epoch = 0;
  std::size_t transform_failures = 0;
  std::size_t restarts = 0;
};

StrategyState init_state(const StrategyConfig& config, const SearchPoint& y_init);

/// Recomputes sqrtC from C. When C is not numerically positive definite the
/// previous transform is kept and false is returned.
bool refresh_transform(StrategyState& state);

/// Draws `lambda` offspring around the current mean and evaluates them.
/// Non-finite objective values are replaced by `penalty`.
std::vector<Individual> sample_offspring(const StrategyState& state, const Objective& objective,
                                         std::size_t lambda, Rng& rng, double penalty,
                                         std::size_t threads = 1);

struct Selection {
  std::vector<Individual> parents;
  Individual recombinant;  // centroid of parents; fitness not evaluated
};

/// Keeps the mu best (stable with respect to population order) and averages
/// their y, w and z vectors.
Selection select_and_recombine(std::span<const Individual> pop, std::size_t mu);

void update_paths_and_covariance(StrategyState& state, const Individual& recombinant,
                                 std::size_t mu);

void update_step_size(StrategyState& state, const Individual& recombinant, std::size_t mu);

/// max(lambda_min, lambda_max - generation).
std::size_t adapt_lambda(const StrategyConfig& config, std::size_t generation);

bool is_prime(std::size_t value);

/// At prime generations appends the best archived solutions not already in
/// `pop`. Returns the number of individuals added.
std::size_t maybe_reinject_elite(const StrategyState& state, const StrategyConfig& config,
                                 std::vector<Individual>& pop);

/// Resets the search distribution when the population mean fitness has not
/// moved by more than stagnation_tol. Returns true on restart.
bool detect_stagnation_and_restart(StrategyState& state, const StrategyConfig& config,
                                   double mean_fitness, Rng& rng);

struct GenerationRecord {
  std::size_t generation = 0;
  double best_fitness = 0.0;      // best so far
  double generation_best = 0.0;   // best of this generation's population
  double mean_fitness = 0.0;      // arithmetic mean over sampled offspring
  double sigma = 0.0;             // after this generation's update
  std::size_t lambda = 0;
  std::size_t reinjected = 0;
  bool restarted = false;
};

enum class StopReason { SigmaBelowMin, GenerationCap };

struct EvolveResult {
  Individual best;
  std::vector<GenerationRecord> history;
  EliteArchive elite;
  StopReason stop = StopReason::GenerationCap;
};

/// Called once per generation after the state update.
using GenerationObserver =
    std::function<void(const GenerationRecord&, const Individual& generation_best)>;

EvolveResult evolve(const Objective& objective, const StrategyConfig& config,
                    const SearchPoint& y_init, const GenerationObserver& observer = {});

}  // namespace kappafit::cmaes
