#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "varosc/varosc.hpp"

namespace fs = std::filesystem;
using namespace varosc;
using varosc::cli::run;

namespace {

const fs::path kRecipes = VAROSC_RECIPE_DIR;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "varosc");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "varosc_cli_tests" /
                 (name + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const auto p = dir / "config.json";
  std::ofstream(p) << body;
  return p;
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  return out;
}

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  EXPECT_TRUE(in.good()) << p;
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line.substr(2));
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      std::vector<double> row;
      for (const auto& c : split(line))
        row.push_back(std::strtod(c.c_str(), nullptr));
      csv.rows.push_back(row);
    }
  }
  return csv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

} // namespace

TEST(ConfigErrors, MissingPotentialNamesField) {
  const auto dir = scratch("cfg");
  const auto r = invoke({"spectrum", "--config", write_config(dir, R"({"solver": {"N": 10}})").string(), "--out",
                         (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'potential'"), std::string::npos) << r.err;
}

TEST(ConfigErrors, EmptyCoefficientList) {
  const auto dir = scratch("cfg");
  const auto r = invoke({"spectrum", "--config", write_config(dir, R"({"potential": [], "solver": {"N": 10}})").string(),
                         "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'potential'"), std::string::npos) << r.err;
}

TEST(ConfigErrors, FieldLevelMessages) {
  const auto dir = scratch("cfg");
  struct Case {
    const char* body;
    const char* field;
  };
  const Case cases[] = {
      {R"({"potential": {"quartic": {"m2": 1, "g": -1}}, "solver": {"N": 10}})", "'potential'"},
      {R"({"potential": {"quartic": {"m2": 1}}, "solver": {"N": 10}})", "'potential.quartic.g'"},
      {R"({"potential": [0, 0, 1], "solver": {"N": 0}})", "'solver.N'"},
      {R"({"potential": [0, 0, 1], "solver": {"N": 10, "bogus": 1}})", "'solver.bogus'"},
      {R"({"potential": [0, 0, 1], "solver": {"N": 10, "levels": [4, 2]}})", "'solver.levels'"},
      {R"({"potential": [0, 0, 1], "solver": {"N": 10, "levels": [0, 10]}})", "'solver.levels'"},
      {R"({"potential": [0, 0, 1, 1]})", "'potential'"},
      {R"({"potential": [0, 0, 1]})", "'solver.N'"},
      {R"({"potential": [0, 0, 1], "solver": {"N": "ten"}})", "'solver.N'"},
  };
  for (const auto& c : cases) {
    const auto r = invoke({"spectrum", "--config", write_config(dir, c.body).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2) << c.body;
    EXPECT_NE(r.err.find(c.field), std::string::npos) << c.body << "\n" << r.err;
  }
}

TEST(ConfigErrors, EvolutionFields) {
  const auto dir = scratch("cfg");
  const char* bodies[] = {
      R"({"potential": [0, 0, 1], "solver": {"N": 10}, "evolution": {"width": 1}})",
      R"({"potential": [0, 0, 1], "solver": {"N": 10}, "evolution": {"width": -1, "t_max": 0}})",
      R"({"potential": [0, 0, 1], "solver": {"N": 10}, "evolution": {"width": 1, "width_in_m": 1, "t_max": 0}})",
      R"({"potential": [0, 0, 1], "solver": {"N": 10}, "evolution": {"width": 1, "x0": 1, "t_max": 0}})",
      R"({"potential": [0, 0, 1], "solver": {"N": 10}, "evolution": {"width": 1, "t_max": 5}})",
      R"({"potential": [0, 0, 1], "solver": {"N": 10}})",
  };
  for (const char* b : bodies) {
    const auto r = invoke({"evolve", "--config", write_config(dir, b).string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2) << b;
    EXPECT_NE(r.err.find("'evolution"), std::string::npos) << b << "\n" << r.err;
  }
}

TEST(ConfigErrors, MalformedInputs) {
  const auto dir = scratch("cfg");
  EXPECT_EQ(invoke({"spectrum", "--config", write_config(dir, "{not json").string()}).code, 2);
  EXPECT_EQ(invoke({"spectrum", "--config", (dir / "absent.json").string()}).code, 2);
  EXPECT_EQ(invoke({"spectrum"}).code, 2);
  EXPECT_EQ(invoke({"nonsense", "--config", "x"}).code, 2);
  const auto good = write_config(dir, R"({"potential": [0, 0, 1], "solver": {"N": 10}})");
  EXPECT_EQ(invoke({"spectrum", "--config", good.string(), "--levels", "3-4", "--out", (dir / "o").string()}).code,
            2);
  EXPECT_EQ(invoke({"spectrum", "--config", good.string(), "--threads", "0", "--out", (dir / "o").string()}).code, 2);
}

TEST(ConfigErrors, NumericalFailureExits3) {
  // a packet far outside the basis support trips the tail check
  const auto dir = scratch("num");
  const auto cfg = write_config(dir, R"({"potential": [0, 0, 0.5], "solver": {"N": 6},
    "evolution": {"initial": "quadrature", "width": 0.05, "x0": 4, "t_max": 0}})");
  const auto r = invoke({"evolve", "--config", cfg.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Levels, Parse) {
  EXPECT_EQ(cli::parse_levels("0..9"), (cli::LevelRange{0, 9}));
  EXPECT_EQ(cli::parse_levels(" 5 .. 5 "), (cli::LevelRange{5, 5}));
  EXPECT_THROW(cli::parse_levels("9..0"), cli::ConfigError);
  EXPECT_THROW(cli::parse_levels("a..b"), cli::ConfigError);
  EXPECT_THROW(cli::parse_levels("-1..2"), cli::ConfigError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3, -1229.1160510460046, 6.02214076e23, 5e-324, 13.388441701008100})
    EXPECT_EQ(std::strtod(cli::format_real(v).c_str(), nullptr), v);
  EXPECT_EQ(cli::format_real(0.1), "0.10000000000000001");
}

TEST(Spectrum, QuarticRecipe) {
  const auto dir = scratch("spectrum");
  const auto r = invoke({"spectrum", "--config", (kRecipes / "quartic_mei97.json").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_csv(dir / "levels.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"n", "E_n"}));
  ASSERT_EQ(csv.rows.size(), 10u);
  EXPECT_EQ(cli::format_real(2 * csv.rows[0][1]).substr(0, 13), "13.3884417010");

  // exact round trip against the in-memory solve
  const auto mem = solve_spectrum(from_quartic(1.0, 1000.0), 100);
  for (const auto& row : csv.rows)
    EXPECT_EQ(row[1], mem.energy(static_cast<std::size_t>(row[0])));
  const auto pms = read_json(dir / "pms.json");
  EXPECT_EQ(pms["omega"].get<double>(), mem.pms.omega);
  EXPECT_EQ(pms["N"].get<int>(), 100);
  EXPECT_TRUE(pms.contains("trace"));
  EXPECT_TRUE(pms.contains("residual"));
}

TEST(Spectrum, AsymmetricRecipe) {
  const auto dir = scratch("spectrum");
  ASSERT_EQ(invoke({"spectrum", "--config", (kRecipes / "asym_n40.json").string(), "--out", dir.string()}).code, 0);
  const auto pms = read_json(dir / "pms.json");
  EXPECT_NEAR(pms["sigma"].get<double>(), -3.583, 5e-4);
  EXPECT_NEAR(pms["omega"].get<double>(), 27.431, 5e-4);
  const auto csv = read_csv(dir / "levels.csv");
  EXPECT_NEAR(csv.rows[0][1], -1229.1160510460046, 1e-12 * 1229.2);
}

TEST(Spectrum, LevelsFlagOverridesConfig) {
  const auto dir = scratch("spectrum");
  ASSERT_EQ(invoke({"spectrum", "--config", (kRecipes / "quartic_mei97.json").string(), "--out", dir.string(),
                    "--levels", "3..5"})
                .code,
            0);
  const auto csv = read_csv(dir / "levels.csv");
  ASSERT_EQ(csv.rows.size(), 3u);
  EXPECT_EQ(csv.rows[0][0], 3.0);
}

TEST(Spectrum, CenteredRecipe) {
  const auto dir = scratch("spectrum");
  ASSERT_EQ(
      invoke({"spectrum", "--config", (kRecipes / "quartic_centered_level100.json").string(), "--out", dir.string()})
          .code,
      0);
  const auto csv = read_csv(dir / "levels.csv");
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][0], 100.0);
  const auto plain = solve_spectrum(from_quartic(1.0, 1000.0), 300);
  EXPECT_NEAR(csv.rows[0][1], plain.energy(100), 1e-8 * plain.energy(100));
  EXPECT_EQ(read_json(dir / "pms.json")["center"].get<int>(), 20);
}

TEST(TraceScan, QuarticSingleInteriorMinimum) {
  const auto dir = scratch("scan");
  ASSERT_EQ(invoke({"trace-scan", "--config", (kRecipes / "quartic_trace_scan.json").string(), "--out", dir.string()})
                .code,
            0);
  const auto csv = read_csv(dir / "trace_scan.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"N", "omega", "trace_over_N", "pms"}));
  for (double n : {10.0, 20.0, 50.0, 100.0}) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : csv.rows)
      if (r[0] == n)
        rows.push_back(r);
    ASSERT_EQ(rows.size(), 242u);
    int local_minima = 0, marked = 0;
    std::size_t pms_index = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][3] == 1) {
        ++marked;
        pms_index = i;
      }
      if (i > 0 && i + 1 < rows.size() && rows[i][2] < rows[i - 1][2] && rows[i][2] < rows[i + 1][2])
        ++local_minima;
    }
    EXPECT_EQ(local_minima, 1) << n;
    EXPECT_EQ(marked, 1) << n;
    for (const auto& r : rows)
      EXPECT_GE(r[2], rows[pms_index][2]);
  }
  const auto pms = read_json(dir / "pms.json");
  EXPECT_EQ(pms.size(), 4u);
}

TEST(TraceScan, HarmonicMinimumAtM) {
  const auto dir = scratch("scan");
  const double m = 1.7;
  const auto cfg = write_config(dir, R"({"potential": [0, 0, )" + cli::format_real(m * m / 2) +
                                         R"(], "trace_scan": {"N": [5, 30], "omega_min": 0.1, "omega_max": 10}})");
  ASSERT_EQ(invoke({"trace-scan", "--config", cfg.string(), "--out", (dir / "o").string()}).code, 0);
  for (const auto& r : read_csv(dir / "o" / "trace_scan.csv").rows)
    if (r[3] == 1)
      EXPECT_NEAR(r[1], m, 1e-9);
}

TEST(TraceScan, GridExcludingMinimumWarns) {
  const auto dir = scratch("scan");
  const auto cfg = write_config(dir, R"({"potential": {"quartic": {"m2": 1, "g": 1000}},
    "trace_scan": {"N": [10], "omega_min": 1, "omega_max": 5, "points": 20}})");
  const auto r = invoke({"trace-scan", "--config", cfg.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto csv = read_csv(dir / "o" / "trace_scan.csv");
  EXPECT_EQ(csv.rows.size(), 20u);
  for (const auto& row : csv.rows)
    EXPECT_EQ(row[3], 0.0);
}

TEST(Evolve, SlowRollCenteredRecipe) {
  const auto dir = scratch("evolve");
  const auto r = invoke({"evolve", "--config", (kRecipes / "slowroll_centered.json").string(), "--out", dir.string(),
                         "--threads", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_csv(dir / "observables.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"t", "x_mean", "x2_mean", "sqrt_x2"}));
  ASSERT_EQ(csv.rows.size(), 401u);
  EXPECT_NEAR(csv.rows[0][3], 2.2134, 1e-4);
  ASSERT_FALSE(csv.comments.empty());
  EXPECT_EQ(csv.comments[0].rfind("truncation_loss=", 0), 0u);
  for (const char* t : {"0", "100", "200"}) {
    const auto snap = read_csv(dir / (std::string("wavefunction_t") + t + ".csv"));
    EXPECT_EQ(snap.header, (std::vector<std::string>{"x", "re", "im", "abs2"}));
    EXPECT_EQ(snap.rows.size(), 301u);
  }
}

TEST(Evolve, SlowRollShiftedSweepWritesFourFiles) {
  const auto dir = scratch("evolve");
  ASSERT_EQ(invoke({"evolve", "--config", (kRecipes / "slowroll_shifted.json").string(), "--out", dir.string()}).code,
            0);
  const double m = std::sqrt(0.01 * 25 / 6);
  const double mus[] = {m / 4, m / 2, m, 2 * m};
  double prev_loss = INFINITY;
  for (int i = 0; i < 4; ++i) {
    const auto csv = read_csv(dir / ("observables_mu" + std::to_string(i) + ".csv"));
    ASSERT_EQ(csv.rows.size(), 801u);
    ASSERT_GE(csv.comments.size(), 2u);
    EXPECT_NE(csv.comments[1].find("mu=" + cli::format_real(mus[i])), std::string::npos);
    // wider packets lose more weight to truncation
    const double loss = std::strtod(csv.comments[0].substr(16).c_str(), nullptr);
    EXPECT_LT(loss, prev_loss);
    prev_loss = loss;
  }
  // the narrowest packet is fully resolved and starts at x0
  EXPECT_NEAR(read_csv(dir / "observables_mu3.csv").rows[0][1], 5.0, 1e-10);
}

TEST(Evolve, ZeroDurationSingleRow) {
  const auto dir = scratch("evolve");
  const double m = 0.9;
  const auto cfg = write_config(dir, R"({"potential": [0, 0, 0.405], "solver": {"N": 40},
    "evolution": {"initial": "centered", "width": 0.9, "t_max": 0}})");
  ASSERT_EQ(invoke({"evolve", "--config", cfg.string(), "--out", (dir / "o").string()}).code, 0);
  const auto csv = read_csv(dir / "o" / "observables.csv");
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(csv.rows[0][0], 0.0);
  EXPECT_NEAR(csv.rows[0][1], 0.0, 1e-15);
  EXPECT_NEAR(csv.rows[0][2], 1 / m, 1e-12);
  EXPECT_NEAR(csv.rows[0][3], std::sqrt(1 / m), 1e-12);
}

TEST(Convergence, QuarticRecipe) {
  const auto dir = scratch("conv");
  ASSERT_EQ(
      invoke({"convergence", "--config", (kRecipes / "quartic_convergence.json").string(), "--out", dir.string()})
          .code,
      0);
  const auto csv = read_csv(dir / "convergence.csv");
  EXPECT_EQ(csv.header, (std::vector<std::string>{"N", "n", "delta"}));
  ASSERT_EQ(csv.rows.size(), 6u);
  EXPECT_LT(csv.rows[5][2], csv.rows[0][2]);
  EXPECT_EQ(read_json(dir / "pms.json")["by_N"].size(), 6u);
}

TEST(Reproducibility, RerunsAreBitIdentical) {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  const std::pair<const char*, const char*> recipes[] = {{"spectrum", "asym_n40.json"},
                                                         {"trace-scan", "quartic_trace_scan.json"},
                                                         {"convergence", "quartic_convergence.json"},
                                                         {"evolve", "slowroll_centered.json"}};
  for (const auto& [cmd, file] : recipes) {
    const auto cfg = (kRecipes / file).string();
    ASSERT_EQ(invoke({cmd, "--config", cfg, "--out", a.string(), "--threads", "1"}).code, 0);
    ASSERT_EQ(invoke({cmd, "--config", cfg, "--out", b.string(), "--threads", "4"}).code, 0);
    for (const auto& entry : fs::directory_iterator(a))
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << cmd << " " << entry.path();
  }
}
