#include "kappafit/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <spdlog/spdlog.h>

#include "kappafit/errors.hpp"

namespace kappafit::cmaes {

void StrategyConfig::validate() const {
  if (n < 1) throw ConfigError("dimension n must be >= 1");
  if (mu < 1) throw ConfigError("mu must be >= 1");
  if (mu > lambda_min) throw ConfigError("mu must not exceed lambda_min");
  if (lambda_min > lambda_max) throw ConfigError("lambda_min must not exceed lambda_max");
  if (!(sigma_min > 0.0)) throw ConfigError("sigma_min must be > 0");
  if (!(sigma_init > sigma_min)) throw ConfigError("sigma_init must exceed sigma_min");
  if (!std::isfinite(penalty)) throw ConfigError("penalty must be finite");
  if (!(stagnation_tol >= 0.0)) throw ConfigError("stagnation_tol must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

bool EliteArchive::merge(const Individual& candidate, double penalty) {
  if (!std::isfinite(candidate.fitness) || candidate.fitness >= penalty) return false;
  const bool present = std::any_of(entries_.begin(), entries_.end(),
                                   [&](const Individual& e) { return e.y == candidate.y; });
  if (present || capacity_ == 0) return false;
  auto pos = std::upper_bound(
      entries_.begin(), entries_.end(), candidate.fitness,
      [](double f, const Individual& e) { return f < e.fitness; });
  entries_.insert(pos, candidate);
  if (entries_.size() > capacity_) entries_.pop_back();
  return true;
}

StrategyState init_state(const StrategyConfig& config, const SearchPoint& y_init) {
  config.validate();
  if (static_cast<std::size_t>(y_init.size()) != config.n) {
    throw ConfigError("initial point has length " + std::to_string(y_init.size()) +
                      ", expected " + std::to_string(config.n));
  }
  if (!y_init.allFinite()) throw ConfigError("initial point must be finite");

  const auto n = static_cast<Eigen::Index>(config.n);
  const double dn = static_cast<double>(config.n);
  StrategyState state;
  state.y_init = y_init;
  state.y_parent = y_init;
  state.sigma = config.sigma_init;
  state.C = Matrix::Identity(n, n);
  state.sqrtC = Matrix::Identity(n, n);
  state.s = Vector::Zero(n);
  state.s_sigma = Vector::Zero(n);
  state.tau = std::sqrt(dn);
  state.tau_c = dn * dn;
  state.tau_sigma = std::sqrt(dn);
  state.elite = EliteArchive(config.elite_capacity);
  state.best.y = y_init;
  state.best.w = Vector::Zero(n);
  state.best.z = Vector::Zero(n);
  return state;
}

bool refresh_transform(StrategyState& state) {
  Eigen::LLT<Matrix> llt(state.C);
  if (llt.info() != Eigen::Success) {
    ++state.transform_failures;
    spdlog::warn("generation {}: covariance not positive definite, keeping previous transform",
                 state.generation);
    return false;
  }
  Matrix lower = llt.matrixL();
  if (!lower.allFinite()) {
    ++state.transform_failures;
    spdlog::warn("generation {}: non-finite Cholesky factor, keeping previous transform",
                 state.generation);
    return false;
  }
  state.sqrtC = std::move(lower);
  return true;
}

namespace {

double sanitize(double value, double penalty) {
  if (std::isfinite(value)) return value;
  spdlog::warn("objective returned a non-finite value; replaced by penalty {}", penalty);
  return penalty;
}

// Evaluation order does not influence results: draws happen beforehand and
// each worker writes only its own slots.
void evaluate_all(std::vector<Individual>& pop, const Objective& objective, double penalty,
                  std::size_t threads) {
  const std::size_t workers = std::min(threads, pop.size());
  if (workers <= 1) {
    for (auto& ind : pop) ind.fitness = sanitize(objective(ind.y), penalty);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < pop.size(); i += workers) {
        pop[i].fitness = sanitize(objective(pop[i].y), penalty);
      }
    });
  }
}

}  // namespace

std::vector<Individual> sample_offspring(const StrategyState& state, const Objective& objective,
                                         std::size_t lambda, Rng& rng, double penalty,
                                         std::size_t threads) {
  const auto n = state.y_parent.size();
  std::vector<Individual> pop(lambda);
  for (auto& ind : pop) {
    ind.z.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) ind.z[k] = rng.normal();
    ind.w = state.sigma * (state.sqrtC * ind.z);
    ind.y = state.y_parent + ind.w;
  }
  evaluate_all(pop, objective, penalty, threads);
  return pop;
}

Selection select_and_recombine(std::span<const Individual> pop, std::size_t mu) {
  if (pop.empty()) throw std::logic_error("select_and_recombine: empty population");
  if (mu < 1 || mu > pop.size()) {
    throw std::logic_error("select_and_recombine: mu must be in [1, population size]");
  }
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop[a].fitness < pop[b].fitness;
  });

  Selection sel;
  sel.parents.reserve(mu);
  for (std::size_t i = 0; i < mu; ++i) sel.parents.push_back(pop[order[i]]);

  const auto& first = sel.parents.front();
  Individual& rec = sel.recombinant;
  rec.y = Vector::Zero(first.y.size());
  rec.w = Vector::Zero(first.w.size());
  rec.z = Vector::Zero(first.z.size());
  for (const auto& p : sel.parents) {
    rec.y += p.y;
    rec.w += p.w;
    rec.z += p.z;
  }
  const double inv = 1.0 / static_cast<double>(mu);
  rec.y *= inv;
  rec.w *= inv;
  rec.z *= inv;
  rec.fitness = std::numeric_limits<double>::quiet_NaN();
  return sel;
}

void update_paths_and_covariance(StrategyState& state, const Individual& recombinant,
                                 std::size_t mu) {
  const double tau = state.tau;
  const double m = static_cast<double>(mu);
  state.s = (1.0 - 1.0 / tau) * state.s +
            std::sqrt(m / tau * (2.0 - 1.0 / tau)) * recombinant.w / state.sigma;
  state.C = (1.0 - 1.0 / state.tau_c) * state.C + (state.s / state.tau_c) * state.s.transpose();
  Matrix sym = (state.C + state.C.transpose()) / 2.0;
  state.C = std::move(sym);
}

void update_step_size(StrategyState& state, const Individual& recombinant, std::size_t mu) {
  const double tau = state.tau_sigma;
  const double m = static_cast<double>(mu);
  const double dn = static_cast<double>(state.s_sigma.size());
  state.s_sigma = (1.0 - 1.0 / tau) * state.s_sigma +
                  std::sqrt(m / tau * (2.0 - 1.0 / tau)) * recombinant.z;
  state.sigma *= std::exp((state.s_sigma.squaredNorm() - dn) / (2.0 * dn * std::sqrt(dn)));
}

std::size_t adapt_lambda(const StrategyConfig& config, std::size_t generation) {
  if (generation >= config.lambda_max) return config.lambda_min;
  return std::max(config.lambda_min, config.lambda_max - generation);
}

bool is_prime(std::size_t value) {
  if (value < 2) return false;
  if (value % 2 == 0) return value == 2;
  for (std::size_t d = 3; d * d <= value; d += 2) {
    if (value % d == 0) return false;
  }
  return true;
}

std::size_t maybe_reinject_elite(const StrategyState& state, const StrategyConfig& config,
                                 std::vector<Individual>& pop) {
  if (!config.use_elite || !is_prime(state.generation)) return 0;
  const auto entries = state.elite.entries();
  const std::size_t take = std::min(config.elite_reinject_count, entries.size());
  std::size_t added = 0;
  for (std::size_t i = 0; i < take; ++i) {
    const auto& e = entries[i];
    const bool dup = std::any_of(pop.begin(), pop.end(),
                                 [&](const Individual& p) { return p.y == e.y; });
    if (!dup) {
      pop.push_back(e);
      ++added;
    }
  }
  return added;
}

bool detect_stagnation_and_restart(StrategyState& state, const StrategyConfig& config,
                                   double mean_fitness, Rng& rng) {
  const double previous = state.prev_mean_fitness;
  state.prev_mean_fitness = mean_fitness;
  if (!config.use_restart || std::isnan(previous)) return false;
  if (!(std::abs(mean_fitness - previous) <= config.stagnation_tol)) return false;

  const auto n = static_cast<Eigen::Index>(config.n);
  const double dn = static_cast<double>(config.n);
  state.y_parent = state.y_init * rng.uniform(0.5, 1.0);
  state.lambda_epoch = state.generation + 1;
  state.tau = std::sqrt(dn);
  state.tau_c = dn * dn;
  state.tau_sigma = std::sqrt(dn);
  state.C = Matrix::Identity(n, n);
  state.sqrtC = Matrix::Identity(n, n);
  state.sigma = config.sigma_init;
  state.s = Vector::Zero(n);
  state.s_sigma = Vector::Zero(n);
  ++state.restarts;
  return true;
}

EvolveResult evolve(const Objective& objective, const StrategyConfig& config,
                    const SearchPoint& y_init, const GenerationObserver& observer) {
  StrategyState state = init_state(config, y_init);
  Rng rng(config.rng_seed);
  state.best.fitness = sanitize(objective(y_init), config.penalty);

  EvolveResult result;
  result.stop = StopReason::GenerationCap;
  while (true) {
    ++state.generation;
    if (state.generation > config.max_gens) break;

    refresh_transform(state);
    const std::size_t lambda = config.adaptive_lambda
                                   ? adapt_lambda(config, state.generation - state.lambda_epoch)
                                   : config.lambda_max;

    auto pop = sample_offspring(state, objective, lambda, rng, config.penalty, config.threads);
    double mean = 0.0;
    for (const auto& ind : pop) mean += ind.fitness;
    mean /= static_cast<double>(pop.size());

    const std::size_t reinjected = maybe_reinject_elite(state, config, pop);
    Selection sel = select_and_recombine(pop, config.mu);
    const Individual& gen_best = sel.parents.front();
    if (config.use_elite) state.elite.merge(gen_best, config.penalty);
    if (gen_best.fitness < state.best.fitness) state.best = gen_best;

    state.y_parent = sel.recombinant.y;
    update_paths_and_covariance(state, sel.recombinant, config.mu);
    update_step_size(state, sel.recombinant, config.mu);
    const bool restarted = detect_stagnation_and_restart(state, config, mean, rng);

    GenerationRecord rec;
    rec.generation = state.generation;
    rec.best_fitness = state.best.fitness;
    rec.generation_best = gen_best.fitness;
    rec.mean_fitness = mean;
    rec.sigma = state.sigma;
    rec.lambda = lambda;
    rec.reinjected = reinjected;
    rec.restarted = restarted;
    result.history.push_back(rec);
    if (observer) observer(rec, gen_best);

    if (state.sigma < config.sigma_min) {
      result.stop = StopReason::SigmaBelowMin;
      break;
    }
  }
  result.best = state.best;
  result.elite = state.elite;
  return result;
}

}  // namespace kappafit::cmaes
