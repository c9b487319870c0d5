#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kappafit/errors.hpp"
#include "kappafit/fitness.hpp"
#include "kappafit/rng.hpp"
#include "kappafit/synthetic.hpp"

using namespace kappafit;
using namespace kappafit::fitness;

namespace {

const shear::RationalKappa kRefKappa{1.8, 25.75, 0.418};

shear::HypothesisTriple hyp(const char* t) { return *shear::HypothesisTriple::parse(t); }

std::vector<SpecimenCase> manufactured_db(std::size_t count, std::uint64_t seed) {
  std::vector<SpecimenCase> db;
  for (const auto& m : synthetic::random_manufactured(count, seed, kRefKappa)) {
    db.push_back(make_case(m.specimen, {m.hyp}, {m.theta + 0.03}));
  }
  return db;
}

// Shear far above any crushing capacity: every attempt fails.
SpecimenCase hopeless(const std::string& name) {
  auto m = synthetic::random_manufactured(1, 5, kRefKappa).front();
  m.specimen.name = name;
  m.specimen.V *= 50.0;
  return make_case(m.specimen, {hyp("EEP"), hyp("PPP")}, {0.5, 0.6});
}

}  // namespace

TEST(CoordinateMap, KnownValues) {
  EXPECT_NEAR(coef(0.5), 0.0, 1e-16);
  EXPECT_NEAR(coef(0.75), 1.0, 1e-15);
  EXPECT_NEAR(coord(0.0), 0.5, 1e-16);
}

TEST(CoordinateMap, RoundTripProperty) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(1e-6, 1.0 - 1e-6);
    EXPECT_NEAR(coord(coef(x)), x, 1e-12);
  }
}

TEST(DecodeCandidate, ZeroFunctionIsAccepted) {
  FitnessConfig cfg;
  cmaes::SearchPoint y(3);
  y << 0.5, 0.5, 0.75;
  const auto model = decode_candidate(y, cfg);
  ASSERT_TRUE(model.has_value());
  const auto& r = std::get<shear::RationalKappa>(*model);
  EXPECT_NEAR(r.a, 0.0, 1e-16);
  EXPECT_NEAR(r.b, 0.0, 1e-16);
  EXPECT_NEAR(r.c, 1.0, 1e-15);
  EXPECT_NEAR(shear::eval_kappa(*model, 0.004), 0.0, 1e-15);
}

TEST(DecodeCandidate, DegradationAboveUnityIsRejected) {
  FitnessConfig cfg;
  // a = 1.2, b = 0 gives a/(1+b) = 1.2.
  const auto y = encode_model(shear::RationalKappa{1.2, 0.0, 0.5});
  EXPECT_FALSE(decode_candidate(y, cfg).has_value());
  const auto objective = make_objective({}, cfg);
  EXPECT_EQ(objective(y), cfg.penalty);
}

TEST(DecodeCandidate, CubicHasNoGuard) {
  FitnessConfig cfg;
  cfg.kappa_form = KappaForm::Cubic;
  const auto y = encode_model(shear::CubicKappa{3.0, 2.0, 1.0, 5.0});
  const auto model = decode_candidate(y, cfg);
  ASSERT_TRUE(model.has_value());
  const auto& c = std::get<shear::CubicKappa>(*model);
  EXPECT_NEAR(c.a, 3.0, 1e-12);
  EXPECT_NEAR(c.d, 5.0, 1e-12);
}

TEST(DecodeCandidate, PolesAndWrongLengthsFail) {
  FitnessConfig cfg;
  cmaes::SearchPoint pole(3);
  pole << 1.0, 0.5, 0.5;
  EXPECT_FALSE(decode_candidate(pole, cfg).has_value());
  EXPECT_FALSE(decode_candidate(cmaes::SearchPoint::Constant(4, 0.3), cfg).has_value());
}

TEST(NormalizedFitness, ReferenceTranscriptValues) {
  EXPECT_NEAR(normalized_fitness(502.168), 0.497832, 1e-6);
  EXPECT_NEAR(normalized_fitness(545.257), 0.454743, 1e-6);
  EXPECT_EQ(normalized_fitness(0.0), 1.0);
  EXPECT_EQ(normalized_fitness(1000.0), 0.0);
  EXPECT_EQ(normalized_fitness(5000.0), 0.0);
}

TEST(FitnessConfig, PenaltyMustCoverThreshold) {
  FitnessConfig cfg;
  cfg.penalty = 5e4;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.penalty = 1e5;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(MakeCase, RejectsMissingHypothesesAndBadSeeds) {
  auto m = synthetic::random_manufactured(1, 9, kRefKappa).front();
  EXPECT_THROW(make_case(m.specimen, {}, {}), DataError);
  EXPECT_THROW(make_case(m.specimen, {hyp("EEP")}, {}), DataError);
  EXPECT_THROW(make_case(m.specimen, {hyp("EEP")}, {2.0}), DataError);
}

TEST(ObjectiveSuma, ExactMatchScoresZero) {
  const auto db = manufactured_db(1, 21);
  FitnessConfig cfg;
  const auto report = evaluate_model(kRefKappa, db, cfg);
  EXPECT_LT(report.suma, 1e-10);
  EXPECT_FALSE(report.unsolved);
  ASSERT_TRUE(report.per_specimen[0].solution.has_value());
  EXPECT_EQ(report.per_specimen[0].best_hypothesis->str(), db[0].hypotheses[0].str());
}

TEST(ObjectiveSuma, AllPenalizedGivesThresholdExactly) {
  for (std::size_t n : {1u, 3u, 7u}) {
    std::vector<SpecimenCase> db;
    for (std::size_t i = 0; i < n; ++i) db.push_back(hopeless("H" + std::to_string(i)));
    FitnessConfig cfg;
    const auto report = evaluate_model(kRefKappa, db, cfg);
    EXPECT_EQ(report.suma, 1000.0);
    EXPECT_EQ(report.fit, 0.0);
    EXPECT_TRUE(report.unsolved);
    EXPECT_EQ(objective_suma(kRefKappa, db, cfg), cfg.penalty);
    cfg.penalize_unsolved = false;
    EXPECT_EQ(objective_suma(kRefKappa, db, cfg), 1000.0);
  }
}

TEST(ObjectiveSuma, ScoresAreBoundedByPenalty) {
  auto db = manufactured_db(6, 33);
  db.push_back(hopeless("H"));
  FitnessConfig cfg;
  const shear::RationalKappa off{0.9, 40.0, 0.6};
  const auto report = evaluate_model(off, db, cfg);
  for (const auto& s : report.per_specimen) EXPECT_LE(s.score, cfg.penalty);
  EXPECT_LE(report.suma, cfg.penalty / 100.0);
  EXPECT_GE(report.suma, 0.0);
}

TEST(ObjectiveSuma, MeanPropertyOfAddedSpecimen) {
  // Duplicating the database leaves the mean unchanged.
  const auto db = manufactured_db(4, 44);
  auto doubled = db;
  doubled.insert(doubled.end(), db.begin(), db.end());
  FitnessConfig cfg;
  const shear::RationalKappa off{1.1, 20.0, 0.5};
  EXPECT_NEAR(evaluate_model(off, doubled, cfg).suma, evaluate_model(off, db, cfg).suma, 1e-9);
}

TEST(ObjectiveSuma, DeterministicForFixedInputs) {
  const auto db = manufactured_db(5, 55);
  FitnessConfig cfg;
  const shear::RationalKappa off{1.3, 15.0, 0.45};
  EXPECT_EQ(objective_suma(off, db, cfg), objective_suma(off, db, cfg));
}

TEST(ObjectiveSuma, SumaAndFitRankCandidatesAlike) {
  const auto db = manufactured_db(4, 66);
  FitnessConfig cfg;
  Rng rng(3);
  std::vector<std::pair<double, double>> scored;
  for (int i = 0; i < 12; ++i) {
    const shear::RationalKappa k{rng.uniform(0.5, 2.5), rng.uniform(5.0, 40.0),
                                 rng.uniform(0.3, 0.6)};
    const auto r = evaluate_model(k, db, cfg);
    if (r.suma < 1000.0) scored.emplace_back(r.suma, r.fit);
  }
  ASSERT_GE(scored.size(), 2u);
  for (const auto& a : scored) {
    for (const auto& b : scored) {
      if (a.first < b.first) {
        EXPECT_GT(a.second, b.second);
      }
    }
  }
}
