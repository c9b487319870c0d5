#include "kappafit/specimen_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "kappafit/errors.hpp"

namespace kappafit::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_number(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " file: " + path.string());
  return in;
}

// Reads non-blank records, returning (1-based line number, fields).
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_records(std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.emplace_back(lineno, split_csv_line(line));
  }
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::vector<shear::Specimen> load_database(const std::filesystem::path& path) {
  auto in = open_input(path, "database");
  auto rows = read_records(in);
  static constexpr std::array<const char*, kDatabaseColumns> kNames{
      "name",  "sigma_st_exp", "reserved", "alpha1", "alpha2", "alpha_t", "alpha", "z",
      "bw",    "As_x1",        "As_x2",    "As_t",   "s",      "fy_x1",   "fy_x2", "fy_t",
      "fc",    "eps_c",        "fctm",     "Ac_x1",  "Ac_x2",  "Ac_t",    "V"};

  std::vector<shear::Specimen> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [lineno, f] = rows[r];
    if (r == 0 && f.size() > 1 && !parse_number(f[1])) continue;  // header
    const std::string where = path.filename().string() + " row " + std::to_string(lineno);
    if (f.size() != kDatabaseColumns) {
      throw DataError(where + ": expected " + std::to_string(kDatabaseColumns) +
                      " columns, found " + std::to_string(f.size()));
    }
    std::array<double, kDatabaseColumns> v{};
    for (std::size_t c = 1; c < kDatabaseColumns; ++c) {
      if (c == 2) continue;  // reserved
      auto parsed = parse_number(f[c]);
      if (!parsed) throw DataError(where + ": field " + kNames[c] + " is not a number");
      v[c] = *parsed;
    }
    shear::Specimen s;
    s.name = f[0];
    s.sigma_st_exp = v[1];
    s.alpha1 = v[3];
    s.alpha2 = v[4];
    s.alpha_t = v[5];
    s.alpha = v[6];
    s.z = v[7];
    s.bw = v[8];
    s.As_x1 = v[9];
    s.As_x2 = v[10];
    s.As_t = v[11];
    s.s = v[12];
    s.fy_x1 = v[13];
    s.fy_x2 = v[14];
    s.fy_t = v[15];
    s.fc = v[16];
    s.eps_c = v[17];
    s.fctm = v[18];
    s.Ac_x1 = v[19];
    s.Ac_x2 = v[20];
    s.Ac_t = v[21];
    s.V = v[22];
    if (auto bad = shear::invalid_field(s); !bad.empty()) {
      throw DataError(where + ": field " + bad + " violates specimen constraints");
    }
    if (!seen.insert(s.name).second) throw DataError(where + ": duplicate specimen " + s.name);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<shear::Specimen> select_specimens(const std::vector<shear::Specimen>& all,
                                              const std::vector<std::string>& names) {
  if (names.empty()) return all;
  std::vector<shear::Specimen> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    auto it = std::find_if(all.begin(), all.end(),
                           [&](const shear::Specimen& s) { return s.name == name; });
    if (it == all.end()) throw DataError("Specimen " + name + " is not in DataBase.");
    out.push_back(*it);
  }
  return out;
}

HypothesisTable load_hypothesis_table(const std::filesystem::path& path) {
  auto in = open_input(path, "hypotheses");
  auto rows = read_records(in);
  auto is_header = [](const std::vector<std::string>& f) {
    return std::any_of(f.begin() + 1, f.end(), [](const std::string& cell) {
      return !cell.empty() && cell != "Null" && !shear::HypothesisTriple::parse(cell);
    });
  };

  HypothesisTable table;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [lineno, f] = rows[r];
    if (r == 0 && is_header(f)) continue;
    const std::string where = path.filename().string() + " row " + std::to_string(lineno);
    if (f.size() > kMaxHypotheses + 1) throw DataError(where + ": more than five hypotheses");
    std::array<std::optional<shear::HypothesisTriple>, kMaxHypotheses> slots{};
    bool any = false;
    for (std::size_t h = 1; h < f.size(); ++h) {
      if (f[h].empty() || f[h] == "Null") continue;
      auto hyp = shear::HypothesisTriple::parse(f[h]);
      if (!hyp) throw DataError(where + ": invalid hypothesis '" + f[h] + "'");
      slots[h - 1] = *hyp;
      any = true;
    }
    if (!any) throw DataError(where + ": specimen " + f[0] + " lists no hypotheses");
    table[f[0]] = slots;
  }
  return table;
}

SeedTable load_seed_table(const std::filesystem::path& path) {
  auto in = open_input(path, "theta seeds");
  SeedTable table;
  bool first = true;
  for (const auto& [lineno, f] : read_records(in)) {
    const std::string where = path.filename().string() + " row " + std::to_string(lineno);
    if (f.size() > kMaxHypotheses + 1) throw DataError(where + ": more than five seeds");
    if (first && f.size() > 1 && !f[1].empty() && !parse_number(f[1])) {
      first = false;
      continue;  // header
    }
    first = false;
    auto& slots = table[f[0]];
    for (std::size_t h = 1; h < f.size(); ++h) {
      if (f[h].empty() || f[h] == "Null") continue;
      auto deg = parse_number(f[h]);
      if (!deg || !(*deg > 0.0 && *deg < 90.0)) {
        throw DataError(where + ": theta seed '" + f[h] + "' must be in (0, 90) degrees");
      }
      slots[h - 1] = *deg;
    }
  }
  return table;
}

ResolvedTables load_hypotheses_and_seeds(const std::filesystem::path& hyp_path,
                                         const std::optional<std::filesystem::path>& seed_path,
                                         const std::vector<shear::Specimen>& specimens) {
  const auto hyps = load_hypothesis_table(hyp_path);
  SeedTable seeds;
  if (seed_path) {
    if (std::filesystem::exists(*seed_path)) {
      seeds = load_seed_table(*seed_path);
    } else {
      spdlog::warn("theta seed file {} not found; using {} degree seeds", seed_path->string(),
                   kDefaultThetaSeedDeg);
    }
  }

  constexpr double kDegToRad = std::numbers::pi / 180.0;
  ResolvedTables out;
  for (const auto& spec : specimens) {
    auto h = hyps.find(spec.name);
    if (h == hyps.end()) {
      throw DataError("Specimen " + spec.name +
                      " has no valid behaviour hypotheses. Check if 'path' for hypotheses file "
                      "is right.");
    }
    auto srow = seeds.find(spec.name);
    if (srow == seeds.end()) {
      spdlog::warn("Specimen {} has no theta seeds; defaulting to {} degrees", spec.name,
                   kDefaultThetaSeedDeg);
      out.defaulted_seeds.push_back(spec.name);
    }
    auto& hv = out.hypotheses[spec.name];
    auto& sv = out.theta_seeds_rad[spec.name];
    for (std::size_t slot = 0; slot < kMaxHypotheses; ++slot) {
      if (!h->second[slot]) continue;
      hv.push_back(*h->second[slot]);
      if (srow == seeds.end()) {
        sv.push_back(kDefaultThetaSeedDeg * kDegToRad);
      } else if (srow->second[slot]) {
        sv.push_back(*srow->second[slot] * kDegToRad);
      } else {
        throw DataError("Specimen " + spec.name + " has no theta seed for hypothesis " +
                        std::to_string(slot + 1));
      }
    }
  }
  return out;
}

std::vector<fitness::SpecimenCase> build_cases(const std::vector<shear::Specimen>& specimens,
                                               const ResolvedTables& tables) {
  std::vector<fitness::SpecimenCase> cases;
  cases.reserve(specimens.size());
  for (const auto& spec : specimens) {
    cases.push_back(fitness::make_case(spec, tables.hypotheses.at(spec.name),
                                       tables.theta_seeds_rad.at(spec.name)));
  }
  return cases;
}

std::vector<double> coefficients_of(const shear::KappaModel& model) {
  if (const auto* c = std::get_if<shear::CubicKappa>(&model)) return {c->a, c->b, c->c, c->d};
  const auto& r = std::get<shear::RationalKappa>(model);
  return {r.a, r.b, r.c};
}

std::string describe_model(const shear::KappaModel& model) {
  if (const auto* c = std::get_if<shear::CubicKappa>(&model)) {
    return fmt::format("a={:g} b={:g} c={:g} d={:g}", c->a, c->b, c->c, c->d);
  }
  const auto& r = std::get<shear::RationalKappa>(model);
  return fmt::format("a={:g} b={:g} c={:g}", r.a, r.b, r.c);
}

void write_fitness_log(const std::filesystem::path& path,
                       const std::vector<cmaes::GenerationRecord>& history) {
  std::string out = "generation,best_suma,mean_suma,fit,sigma,lambda\n";
  for (const auto& rec : history) {
    out += fmt::format("{},{},{},{},{},{}\n", rec.generation, num(rec.best_fitness),
                       num(rec.mean_fitness), num(fitness::normalized_fitness(rec.best_fitness)),
                       num(rec.sigma), rec.lambda);
  }
  write_file(path, out);
}

void write_elite_csv(const std::filesystem::path& path, const std::vector<EliteRow>& rows,
                     fitness::KappaForm form) {
  std::string out = form == fitness::KappaForm::Cubic ? "fitness,a,b,c,d\n" : "fitness,a,b,c\n";
  for (const auto& row : rows) {
    out += num(row.fitness);
    for (double c : row.coefficients) out += "," + num(c);
    out += "\n";
  }
  write_file(path, out);
}

std::vector<EliteRow> read_elite_csv(const std::filesystem::path& path) {
  auto in = open_input(path, "elite");
  std::vector<EliteRow> rows;
  bool header = true;
  for (const auto& [lineno, f] : read_records(in)) {
    if (header) {
      header = false;
      if (!parse_number(f[0])) continue;
    }
    EliteRow row;
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto v = parse_number(f[i]);
      if (!v) throw DataError(path.filename().string() + " row " + std::to_string(lineno) +
                              ": field " + std::to_string(i + 1) + " is not a number");
      if (i == 0) {
        row.fitness = *v;
      } else {
        row.coefficients.push_back(*v);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_best_report(const std::filesystem::path& path, const shear::KappaModel& model,
                       const fitness::EvaluationReport& report,
                       const std::vector<shear::Specimen>& specimens) {
  const bool cubic = std::holds_alternative<shear::CubicKappa>(model);
  std::string out;
  out += fmt::format("form: {}\n", cubic ? "cubic" : "rational");
  out += cubic ? "kappa(eps1) = a*x^3 + b*x^2 + c*x + d, x = 1000*eps1\n"
               : "kappa(eps1) = a/(1+b*eps1^c)\n";
  out += describe_model(model) + "\n";
  std::string full = "coefficients:";
  for (double c : coefficients_of(model)) full += " " + num(c);
  out += full + "\n";
  out += fmt::format("suma: {}\n", num(report.suma));
  out += fmt::format("fit: {}\n", num(report.fit));
  out += fmt::format("status: {}\n", report.unsolved ? "unsolved" : "solved");
  out += "specimen,hypothesis,eps1,theta_deg,sigma_st_model,sigma_st_exp,score\n";
  for (std::size_t i = 0; i < report.per_specimen.size(); ++i) {
    const auto& s = report.per_specimen[i];
    const double exp_stress = i < specimens.size() ? specimens[i].sigma_st_exp : 0.0;
    if (s.solution) {
      out += fmt::format("{},{},{},{},{},{},{}\n", s.name, s.best_hypothesis->str(),
                         num(s.solution->eps1), num(s.solution->theta * 180.0 / std::numbers::pi),
                         num(s.solution->sigma_st_model), num(exp_stress), num(s.score));
    } else {
      out += fmt::format("{},,,,,{},{}\n", s.name, num(exp_stress), num(s.score));
    }
  }
  write_file(path, out);
}

void write_curve_samples(const std::filesystem::path& path, const shear::KappaModel& model) {
  constexpr int kSamples = 200;
  constexpr double kMaxStrain = 0.01;
  std::string out = "eps1,kappa\n";
  for (int i = 0; i < kSamples; ++i) {
    const double eps1 = kMaxStrain * static_cast<double>(i) / (kSamples - 1);
    out += num(eps1) + "," + num(shear::eval_kappa(model, eps1)) + "\n";
  }
  write_file(path, out);
}

void write_outputs(const std::filesystem::path& dir, const RunArtifacts& run) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_fitness_log(dir / kFitnessLogFile, run.history);
  write_elite_csv(dir / kEliteFile, run.elite, run.form);
  if (run.best_model && run.best_report) {
    write_best_report(dir / kReportFile, *run.best_model, *run.best_report, run.specimens);
    write_curve_samples(dir / kCurveFile, *run.best_model);
  } else {
    write_file(dir / kReportFile, "form: none\nstatus: no valid model found\n");
    write_file(dir / kCurveFile, "eps1,kappa\n");
  }
}

}  // namespace kappafit::io
