#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kappafit/errors.hpp"
#include "kappafit/rng.hpp"
#include "kappafit/specimen_io.hpp"

using namespace kappafit;
using namespace kappafit::io;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("kappafit_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

const char* kHeader =
    "name,sigma_st_exp,reserved,alpha1,alpha2,alpha_t,alpha,z,bw,As_x1,As_x2,As_t,s,fy_x1,"
    "fy_x2,fy_t,fc,eps_c,fctm,Ac_x1,Ac_x2,Ac_t,V\n";
const char* kRowH =
    "H 75/4,530,0,1,0,1,1,404.8,144.5,460,0,75,127,681,0,585,36,0.002,3.27,3705,0,6103,255230\n";
const char* kRowRC =
    "RC 70 B 1,480,x,1,0,1,1,900.5,321.6,2155,0,342.3,196,757,0,518.3,29.7,0.002,2.88,24760,0,"
    "26750,1330000\n";

fs::path golden(const std::string& name) { return fs::path(KAPPAFIT_GOLDEN_DIR) / name; }

}  // namespace

TEST(SplitCsvLine, QuotedFieldsKeepCommas) {
  const auto f = split_csv_line(R"(a, "b,c" ,"d""e",)");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d\"e");
  EXPECT_EQ(f[3], "");
}

TEST(LoadDatabase, ParsesReferenceRows) {
  TempDir tmp;
  const auto path = tmp.write("db.csv", std::string(kHeader) + kRowH + kRowRC);
  const auto db = load_database(path);
  ASSERT_EQ(db.size(), 2u);
  EXPECT_EQ(db[0].name, "H 75/4");
  EXPECT_EQ(db[0].V, 255230.0);
  EXPECT_EQ(db[0].sigma_st_exp, 530.0);
  EXPECT_EQ(db[0].Ac_t, 6103.0);
  EXPECT_FALSE(db[0].has_upper());
  EXPECT_EQ(db[1].name, "RC 70 B 1");
  EXPECT_EQ(db[1].V, 1330000.0);
  EXPECT_EQ(db[1].sigma_st_exp, 480.0);
}

TEST(LoadDatabase, HeaderIsOptional) {
  TempDir tmp;
  EXPECT_EQ(load_database(tmp.write("db.csv", kRowH)).size(), 1u);
}

TEST(LoadDatabase, BundledFixtureLoads) {
  const auto db = load_database(fs::path(KAPPAFIT_DATA_DIR) / "database.csv");
  EXPECT_GE(db.size(), 10u);
}

TEST(LoadDatabase, ErrorsNameRowAndField) {
  TempDir tmp;
  std::string bad = kRowH;
  bad.replace(bad.find(",585,"), 5, ",-585,");
  try {
    load_database(tmp.write("db.csv", std::string(kHeader) + kRowH + bad));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("fy_t"), std::string::npos) << msg;
  }
  EXPECT_THROW(load_database(tmp.write("short.csv", "A,1,2,3\n")), DataError);
  EXPECT_THROW(load_database(tmp.write("dup.csv", std::string(kRowH) + kRowH)), DataError);
  EXPECT_THROW(load_database(tmp.path() / "missing.csv"), DataError);
}

TEST(SelectSpecimens, UnknownNameMessage) {
  TempDir tmp;
  const auto db = load_database(tmp.write("db.csv", std::string(kRowH) + kRowRC));
  try {
    select_specimens(db, {"XXXX"});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "Specimen XXXX is not in DataBase.");
  }
  const auto picked = select_specimens(db, {"RC 70 B 1"});
  ASSERT_EQ(picked.size(), 1u);
  EXPECT_EQ(picked[0].name, "RC 70 B 1");
  EXPECT_EQ(select_specimens(db, {}).size(), 2u);
}

TEST(Hypotheses, MissingSpecimenIsHardError) {
  TempDir tmp;
  const auto db = load_database(tmp.write("db.csv", std::string(kRowH) + kRowRC));
  const auto hyp = tmp.write("h.csv", "name,h1\nH 75/4,EEP\n");
  try {
    load_hypotheses_and_seeds(hyp, std::nullopt, db);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("Specimen RC 70 B 1 has no valid behaviour hypotheses"),
              std::string::npos);
  }
}

TEST(Hypotheses, ParsesTriplesAndSkipsNull) {
  TempDir tmp;
  const auto table = load_hypothesis_table(tmp.write("h.csv", "A,EEP,Null,,PPE\n"));
  const auto& row = table.at("A");
  ASSERT_TRUE(row[0].has_value());
  EXPECT_EQ(row[0]->str(), "EEP");
  EXPECT_FALSE(row[1].has_value());
  EXPECT_FALSE(row[2].has_value());
  EXPECT_EQ(row[3]->str(), "PPE");
  EXPECT_THROW(load_hypothesis_table(tmp.write("bad.csv", "A,EEP\nB,EEQ\n")), DataError);
}

TEST(Seeds, MissingSpecimenDefaultsToThirtyDegrees) {
  TempDir tmp;
  const auto db = load_database(tmp.write("db.csv", std::string(kRowH) + kRowRC));
  const auto hyp = tmp.write("h.csv", "H 75/4,EEP,PPP\nRC 70 B 1,EEP\n");
  const auto seeds = tmp.write("s.csv", "name,s1\nRC 70 B 1,40\n");
  const auto t = load_hypotheses_and_seeds(hyp, seeds, db);
  const double thirty = 30.0 * std::numbers::pi / 180.0;
  EXPECT_EQ(t.theta_seeds_rad.at("H 75/4"), (std::vector<double>{thirty, thirty}));
  EXPECT_DOUBLE_EQ(t.theta_seeds_rad.at("RC 70 B 1")[0], 40.0 * std::numbers::pi / 180.0);
  EXPECT_EQ(t.defaulted_seeds, (std::vector<std::string>{"H 75/4"}));
}

TEST(Seeds, MissingFileDefaultsEverySlot) {
  TempDir tmp;
  const auto db = load_database(tmp.write("db.csv", kRowH));
  const auto hyp = tmp.write("h.csv", "H 75/4,EEP,EPP,PPP,EEE,PEP\n");
  const auto t = load_hypotheses_and_seeds(hyp, tmp.path() / "nope.csv", db);
  const auto& seeds = t.theta_seeds_rad.at("H 75/4");
  ASSERT_EQ(seeds.size(), 5u);
  for (double s : seeds) EXPECT_DOUBLE_EQ(s, std::numbers::pi / 6.0);
}

TEST(Seeds, OutOfRangeRejected) {
  TempDir tmp;
  EXPECT_THROW(load_seed_table(tmp.write("s.csv", "A,95\n")), DataError);
  EXPECT_THROW(load_seed_table(tmp.write("s0.csv", "A,0\n")), DataError);
}

TEST(Writers, FitnessLogGolden) {
  TempDir tmp;
  std::vector<cmaes::GenerationRecord> hist(2);
  hist[0] = {1, 500.0, 500.0, 900.25, 1.0, 19, 0, false};
  hist[1] = {2, 250.0, 250.0, 700.0, 0.75, 18, 1, false};
  write_fitness_log(tmp.path() / "log.csv", hist);
  EXPECT_EQ(slurp(tmp.path() / "log.csv"), slurp(golden("fitness_log.csv")));
}

TEST(Writers, EliteCsvGoldenAndEmpty) {
  TempDir tmp;
  write_elite_csv(tmp.path() / "e.csv", {{1.5, {0.5, 2.0, 0.25}}},
                  fitness::KappaForm::RationalSaturating);
  EXPECT_EQ(slurp(tmp.path() / "e.csv"), slurp(golden("elite.csv")));
  write_elite_csv(tmp.path() / "empty.csv", {}, fitness::KappaForm::Cubic);
  EXPECT_EQ(slurp(tmp.path() / "empty.csv"), "fitness,a,b,c,d\n");
  EXPECT_TRUE(read_elite_csv(tmp.path() / "empty.csv").empty());
}

TEST(Writers, EliteRoundTripIsBitExact) {
  TempDir tmp;
  Rng rng(17);
  std::vector<EliteRow> rows;
  for (int i = 0; i < 16; ++i) {
    EliteRow r;
    r.fitness = rng.uniform(0.0, 1000.0) * std::pow(10.0, rng.uniform(-30.0, 30.0));
    for (int k = 0; k < 4; ++k) r.coefficients.push_back(rng.normal() * 1e3 / 7.0);
    rows.push_back(r);
  }
  write_elite_csv(tmp.path() / "e.csv", rows, fitness::KappaForm::Cubic);
  const auto back = read_elite_csv(tmp.path() / "e.csv");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].fitness, rows[i].fitness);
    EXPECT_EQ(back[i].coefficients, rows[i].coefficients);
  }
}

TEST(Writers, ReportDescribesReferenceCubic) {
  const shear::CubicKappa fig{-0.1713, 0.0346, 1.2902, -0.4725};
  EXPECT_EQ(describe_model(fig), "a=-0.1713 b=0.0346 c=1.2902 d=-0.4725");
  TempDir tmp;
  fitness::EvaluationReport rep;
  rep.suma = 12.5;
  rep.fit = fitness::normalized_fitness(12.5);
  rep.per_specimen.push_back({"A", std::nullopt, std::nullopt, 1e5});
  shear::Specimen a;
  a.name = "A";
  a.sigma_st_exp = 400.0;
  write_best_report(tmp.path() / "r.txt", fig, rep, {a});
  EXPECT_EQ(slurp(tmp.path() / "r.txt"), slurp(golden("best_model.txt")));
}

TEST(Writers, CurveSamples) {
  TempDir tmp;
  write_curve_samples(tmp.path() / "k.csv", shear::RationalKappa{1.0, 0.0, 1.0});
  std::ifstream in(tmp.path() / "k.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "eps1,kappa");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 200);
  EXPECT_EQ(last, "0.01,1");
}

TEST(Writers, OutputDirectoryLayout) {
  TempDir tmp;
  RunArtifacts run;
  run.history.push_back({1, 10.0, 20.0, 10.0, 1.0, 19, 0, false});
  write_outputs(tmp.path() / "out", run);
  EXPECT_EQ(first_line(tmp.path() / "out" / kFitnessLogFile),
            "generation,best_suma,mean_suma,fit,sigma,lambda");
  EXPECT_EQ(first_line(tmp.path() / "out" / kEliteFile), "fitness,a,b,c");
  EXPECT_EQ(first_line(tmp.path() / "out" / kCurveFile), "eps1,kappa");
  EXPECT_TRUE(fs::exists(tmp.path() / "out" / kReportFile));
}

TEST(Writers, UnwritablePathIsIoError) {
  TempDir tmp;
  tmp.write("blocker", "x");
  EXPECT_THROW(write_fitness_log(tmp.path() / "blocker" / "log.csv", {}), IoError);
  EXPECT_THROW(write_outputs(tmp.path() / "blocker" / "sub", RunArtifacts{}), IoError);
}
