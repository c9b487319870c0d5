#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kappafit/errors.hpp"
#include "kappafit/experiment.hpp"

using namespace kappafit;
using namespace kappafit::experiment;
namespace fs = std::filesystem;

namespace {

fs::path data(const char* name) { return fs::path(KAPPAFIT_DATA_DIR) / name; }

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("kappafit_exp_" + tag);
  fs::remove_all(p);
  return p;
}

RunConfig small_run(const std::string& tag) {
  RunConfig cfg;
  cfg.variant = 4;
  cfg.database = data("database.csv");
  cfg.hypotheses = data("hypotheses.csv");
  cfg.theta_seeds = data("theta_seeds.csv");
  cfg.output_dir = scratch(tag);
  cfg.overrides.max_gens = 6;
  cfg.specimens = {"H 75/4", "A50", "NHW-3b"};
  cfg.rng_seed = 42;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(VariantPreset, Defaults) {
  const auto v1 = variant_preset(1);
  EXPECT_EQ(v1.fitness.kappa_form, fitness::KappaForm::Cubic);
  EXPECT_EQ(v1.strategy.n, 4u);
  EXPECT_FALSE(v1.fitness.penalize_unsolved);
  EXPECT_FALSE(v1.strategy.use_elite);
  EXPECT_FALSE(v1.strategy.adaptive_lambda);
  EXPECT_FALSE(v1.strategy.use_restart);

  const auto v2 = variant_preset(2);
  EXPECT_EQ(v2.strategy.mu, 2u);
  EXPECT_EQ(v2.fitness.penalty, 1e5);
  EXPECT_TRUE(v2.fitness.penalize_unsolved);
  EXPECT_FALSE(v2.strategy.use_elite);

  const auto v3 = variant_preset(3);
  EXPECT_TRUE(v3.strategy.use_elite);
  EXPECT_TRUE(v3.strategy.adaptive_lambda);
  EXPECT_TRUE(v3.strategy.use_restart);
  EXPECT_EQ(v3.fitness.kappa_form, fitness::KappaForm::Cubic);

  const auto v4 = variant_preset(4);
  EXPECT_EQ(v4.fitness.kappa_form, fitness::KappaForm::RationalSaturating);
  EXPECT_EQ(v4.strategy.n, 3u);
  EXPECT_EQ(v4.strategy.max_gens, 300u);
  EXPECT_TRUE(v4.strategy.use_elite);

  EXPECT_THROW(variant_preset(0), ConfigError);
  EXPECT_THROW(variant_preset(5), ConfigError);
}

TEST(ResolveSettings, OverridesWin) {
  RunConfig cfg;
  cfg.variant = 4;
  cfg.overrides.mu = 3;
  cfg.overrides.kappa_form = fitness::KappaForm::Cubic;
  cfg.overrides.penalty = 1e6;
  const auto s = resolve_settings(cfg);
  EXPECT_EQ(s.strategy.mu, 3u);
  EXPECT_EQ(s.fitness.kappa_form, fitness::KappaForm::Cubic);
  EXPECT_EQ(s.strategy.n, 4u);
  EXPECT_EQ(s.fitness.penalty, 1e6);
  EXPECT_EQ(s.strategy.penalty, 1e6);
  EXPECT_EQ(s.strategy.rng_seed, cfg.rng_seed);
}

TEST(ResolveSettings, InvalidCombinationIsConfigError) {
  RunConfig cfg;
  cfg.overrides.lambda_min = 30;
  EXPECT_THROW(resolve_settings(cfg), ConfigError);
}

TEST(ConsoleLines, ReferenceTranscript) {
  EXPECT_EQ(candidate_line(shear::RationalKappa{1.82587, 25.7537, 0.418325}, Lang::Es),
            "Polinomio candidato 1.82587/(1+25.7537*ε1^0.418325)");
  EXPECT_EQ(suma_line(502.168, Lang::Es), "Suma 502.168, Fitness Norm. 0.497832");
  EXPECT_EQ(suma_line(545.257, Lang::Es), "Suma 545.257, Fitness Norm. 0.454743");
  EXPECT_EQ(generation_line(1, 2, 19, Lang::Es), "Generacion 1, mu=2, lambda=19");
  EXPECT_EQ(no_solution_line(Lang::Es), "No se alcanza solucion.");
  EXPECT_EQ(restart_line(Lang::Es), "Reinicio..");
}

TEST(ConsoleLines, CubicAndEnglish) {
  EXPECT_EQ(candidate_line(shear::CubicKappa{-0.1713, 0.0346, 1.2902, -0.4725}, Lang::Es),
            "Polinomio candidato -0.1713*x^3+0.0346*x^2+1.2902*x-0.4725 (x=1000*ε1)");
  EXPECT_EQ(generation_line(3, 2, 17, Lang::En), "Generation 3, mu=2, lambda=17");
  EXPECT_EQ(suma_line(0.0, Lang::En), "Sum 0, Normalized fitness 1");
}

TEST(RunExperiment, WritesArtifactsAndLogsProgress) {
  auto cfg = small_run("basic");
  std::ostringstream console;
  const auto r = run_experiment(cfg, console);
  ASSERT_EQ(r.exit_code, kExitOk) << r.error;
  ASSERT_TRUE(r.evolve.has_value());
  EXPECT_LE(r.evolve->history.size(), 6u);
  const std::string text = console.str();
  EXPECT_NE(text.find("Generacion 1, mu=2, lambda=19"), std::string::npos);
  EXPECT_NE(text.find("Polinomio candidato"), std::string::npos);
  for (const char* f : {io::kFitnessLogFile, io::kEliteFile, io::kReportFile, io::kCurveFile}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  std::ifstream log(cfg.output_dir / io::kFitnessLogFile);
  std::string line;
  std::size_t rows = 0;
  std::getline(log, line);
  while (std::getline(log, line)) ++rows;
  EXPECT_EQ(rows, r.evolve->history.size());
  fs::remove_all(cfg.output_dir);
}

TEST(RunExperiment, QuietSuppressesConsoleButWritesFiles) {
  auto cfg = small_run("quiet");
  cfg.quiet = true;
  std::ostringstream console;
  const auto r = run_experiment(cfg, console);
  ASSERT_EQ(r.exit_code, kExitOk) << r.error;
  EXPECT_TRUE(console.str().empty());
  EXPECT_TRUE(fs::exists(cfg.output_dir / io::kFitnessLogFile));
  fs::remove_all(cfg.output_dir);
}

TEST(RunExperiment, SameSeedGivesIdenticalLogs) {
  auto a = small_run("det_a");
  auto b = small_run("det_b");
  std::ostringstream sink;
  ASSERT_EQ(run_experiment(a, sink).exit_code, kExitOk);
  ASSERT_EQ(run_experiment(b, sink).exit_code, kExitOk);
  EXPECT_EQ(slurp(a.output_dir / io::kFitnessLogFile), slurp(b.output_dir / io::kFitnessLogFile));
  EXPECT_EQ(slurp(a.output_dir / io::kEliteFile), slurp(b.output_dir / io::kEliteFile));
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  auto a = small_run("thr_a");
  auto b = small_run("thr_b");
  b.overrides.threads = 3;
  std::ostringstream sink;
  ASSERT_EQ(run_experiment(a, sink).exit_code, kExitOk);
  ASSERT_EQ(run_experiment(b, sink).exit_code, kExitOk);
  EXPECT_EQ(slurp(a.output_dir / io::kFitnessLogFile), slurp(b.output_dir / io::kFitnessLogFile));
  fs::remove_all(a.output_dir);
  fs::remove_all(b.output_dir);
}

TEST(RunExperiment, MissingDatabaseIsDataErrorWithoutOutputs) {
  auto cfg = small_run("missing_db");
  cfg.database = "/nonexistent/database.csv";
  std::ostringstream console;
  const auto r = run_experiment(cfg, console);
  EXPECT_EQ(r.exit_code, kExitDataError);
  EXPECT_FALSE(fs::exists(cfg.output_dir));
}

TEST(RunExperiment, UnknownSpecimenIsDataError) {
  auto cfg = small_run("unknown");
  cfg.specimens = {"XXXX"};
  std::ostringstream console;
  const auto r = run_experiment(cfg, console);
  EXPECT_EQ(r.exit_code, kExitDataError);
  EXPECT_EQ(r.error, "Specimen XXXX is not in DataBase.");
}

TEST(RunExperiment, BadVariantIsConfigError) {
  auto cfg = small_run("badvariant");
  cfg.variant = 7;
  std::ostringstream console;
  EXPECT_EQ(run_experiment(cfg, console).exit_code, kExitConfigError);
  EXPECT_FALSE(fs::exists(cfg.output_dir));
}

TEST(RunExperiment, UnwritableOutputIsIoError) {
  auto cfg = small_run("blocked");
  const auto blocker = scratch("blocker_file");
  std::ofstream(blocker) << "x";
  cfg.output_dir = blocker / "out";
  cfg.overrides.max_gens = 1;
  std::ostringstream console;
  EXPECT_EQ(run_experiment(cfg, console).exit_code, kExitIoError);
  fs::remove_all(blocker);
}
