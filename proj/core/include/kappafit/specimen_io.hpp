#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kappafit/cmaes.hpp"
#include "kappafit/fitness.hpp"
#include "kappafit/shear_model.hpp"

namespace kappafit::io {

/// Database column order (comma separated, optional header row):
///   name, sigma_st_exp, (reserved), alpha1, alpha2, alpha_t, alpha, z, bw,
///   As_x1, As_x2, As_t, s, fy_x1, fy_x2, fy_t, fc, eps_c, fctm,
///   Ac_x1, Ac_x2, Ac_t, V
inline constexpr std::size_t kDatabaseColumns = 23;
inline constexpr std::size_t kMaxHypotheses = 5;
inline constexpr double kDefaultThetaSeedDeg = 30.0;

/// Splits one CSV record; double quotes may enclose fields containing commas.
std::vector<std::string> split_csv_line(const std::string& line);

std::vector<shear::Specimen> load_database(const std::filesystem::path& path);

/// Picks `names` from `all` in the requested order. An empty list selects
/// everything. Throws DataError "Specimen X is not in DataBase." on a miss.
std::vector<shear::Specimen> select_specimens(const std::vector<shear::Specimen>& all,
                                              const std::vector<std::string>& names);

/// Per specimen, up to five hypothesis slots; empty or "Null" cells are unset.
using HypothesisTable = std::map<std::string, std::array<std::optional<shear::HypothesisTriple>, kMaxHypotheses>>;
/// Per specimen, theta seeds in degrees aligned slot-wise with the hypotheses.
using SeedTable = std::map<std::string, std::array<std::optional<double>, kMaxHypotheses>>;

HypothesisTable load_hypothesis_table(const std::filesystem::path& path);
SeedTable load_seed_table(const std::filesystem::path& path);

struct ResolvedTables {
  std::map<std::string, std::vector<shear::HypothesisTriple>> hypotheses;
  std::map<std::string, std::vector<double>> theta_seeds_rad;
  std::vector<std::string> defaulted_seeds;  // specimens that fell back to 30 degrees
};

/// Resolves hypotheses (mandatory per specimen) and theta seeds (optional
/// file; missing specimens get five 30-degree seeds with a warning).
ResolvedTables load_hypotheses_and_seeds(const std::filesystem::path& hyp_path,
                                         const std::optional<std::filesystem::path>& seed_path,
                                         const std::vector<shear::Specimen>& specimens);

std::vector<fitness::SpecimenCase> build_cases(const std::vector<shear::Specimen>& specimens,
                                               const ResolvedTables& tables);

struct EliteRow {
  double fitness = 0.0;
  std::vector<double> coefficients;
};

std::vector<double> coefficients_of(const shear::KappaModel& model);
std::string describe_model(const shear::KappaModel& model);

void write_fitness_log(const std::filesystem::path& path,
                       const std::vector<cmaes::GenerationRecord>& history);
void write_elite_csv(const std::filesystem::path& path, const std::vector<EliteRow>& rows,
                     fitness::KappaForm form);
std::vector<EliteRow> read_elite_csv(const std::filesystem::path& path);
void write_best_report(const std::filesystem::path& path, const shear::KappaModel& model,
                       const fitness::EvaluationReport& report,
                       const std::vector<shear::Specimen>& specimens);
/// kappa(eps1) at 200 equispaced eps1 in [0, 0.01].
void write_curve_samples(const std::filesystem::path& path, const shear::KappaModel& model);

struct RunArtifacts {
  std::vector<cmaes::GenerationRecord> history;
  std::vector<EliteRow> elite;
  fitness::KappaForm form = fitness::KappaForm::RationalSaturating;
  std::optional<shear::KappaModel> best_model;
  std::optional<fitness::EvaluationReport> best_report;
  std::vector<shear::Specimen> specimens;
};

inline constexpr const char* kFitnessLogFile = "fitness_log.csv";
inline constexpr const char* kEliteFile = "elite.csv";
inline constexpr const char* kReportFile = "best_model.txt";
inline constexpr const char* kCurveFile = "kappa_curve.csv";

/// Writes all four artifacts into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const RunArtifacts& run);

}  // namespace kappafit::io
