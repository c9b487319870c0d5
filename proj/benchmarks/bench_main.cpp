#include <benchmark/benchmark.h>

#include <filesystem>

#include "kappafit/cmaes.hpp"
#include "kappafit/fitness.hpp"
#include "kappafit/specimen_io.hpp"
#include "kappafit/synthetic.hpp"

using namespace kappafit;

namespace {

const shear::RationalKappa kRef{1.8, 25.75, 0.418};

void BM_EvolveSphere(benchmark::State& state) {
  cmaes::StrategyConfig cfg;
  cfg.max_gens = static_cast<std::size_t>(state.range(0));
  cfg.sigma_min = 1e-300;
  for (auto _ : state) {
    auto r = cmaes::evolve([](const cmaes::SearchPoint& x) { return x.squaredNorm(); }, cfg,
                           cmaes::Vector::Constant(3, 2.0));
    benchmark::DoNotOptimize(r.best.fitness);
  }
}
BENCHMARK(BM_EvolveSphere)->Arg(50)->Arg(200);

void BM_StateChain(benchmark::State& state) {
  const auto m = synthetic::random_manufactured(1, 1, kRef).front();
  const auto mat = shear::derived_material(m.specimen);
  double eps1 = m.eps1;
  for (auto _ : state) {
    auto out = shear::state_chain(eps1, m.theta, m.specimen, mat, m.kappa, m.hyp);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_StateChain);

void BM_SolveHypothesis(benchmark::State& state) {
  const auto m = synthetic::random_manufactured(1, 2, kRef).front();
  const auto mat = shear::derived_material(m.specimen);
  for (auto _ : state) {
    auto sol = shear::solve_hypothesis(m.specimen, mat, m.hyp, kRef, 0.52);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveHypothesis);

// Loaded once so seed-default warnings are not repeated per benchmark run.
const std::vector<fitness::SpecimenCase>& fixture_cases() {
  static const auto cases = [] {
    const std::filesystem::path dir = KAPPAFIT_DATA_DIR;
    const auto specimens = io::load_database(dir / "database.csv");
    const auto tables =
        io::load_hypotheses_and_seeds(dir / "hypotheses.csv", dir / "theta_seeds.csv", specimens);
    return io::build_cases(specimens, tables);
  }();
  return cases;
}

void BM_FixtureObjective(benchmark::State& state) {
  const auto& cases = fixture_cases();
  const fitness::FitnessConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fitness::objective_suma(kRef, cases, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cases.size()));
}
BENCHMARK(BM_FixtureObjective)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
