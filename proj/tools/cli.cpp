#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "varosc/varosc.hpp"

namespace varosc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key))
    fail(path, "missing");
  const json& v = parent.at(key);
  if (!v.is_object())
    fail(path, "expected an object");
  return v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number())
    fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    fail(path, "must be finite");
  return x;
}

double number_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key))
    fail(path + "." + key, "missing");
  return number(obj.at(key), path + "." + key);
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<std::size_t> count_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty())
    fail(path, "expected a non-empty list of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(count(v[i], path + "[" + std::to_string(i) + "]"));
    if (out.back() < 1)
      fail(path + "[" + std::to_string(i) + "]", "must be at least 1");
  }
  return out;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (v.is_number())
    return {number(v, path)};
  if (!v.is_array() || v.empty())
    fail(path, "expected a number or a non-empty list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

PolynomialPotential<double> parse_potential(const json& root) {
  if (!root.contains("potential") || root.at("potential").is_null())
    fail("potential", "missing");
  const json& p = root.at("potential");
  try {
    if (p.is_array()) {
      if (p.empty())
        fail("potential", "coefficient list is empty");
      std::vector<double> c;
      for (std::size_t i = 0; i < p.size(); ++i)
        c.push_back(number(p[i], "potential[" + std::to_string(i) + "]"));
      return PolynomialPotential<double>(std::move(c));
    }
    if (!p.is_object() || p.size() != 1)
      fail("potential", "expected a coefficient list or exactly one of quartic, double_well, asym_demo");
    const auto& [name, body] = *p.items().begin();
    if (!body.is_object())
      fail("potential." + name, "expected an object");
    if (name == "quartic") {
      reject_unknown(body, "potential.quartic", {"m2", "g", "sign"});
      int sign = 1;
      if (body.contains("sign")) {
        if (!body["sign"].is_number_integer())
          fail("potential.quartic.sign", "expected +1 or -1");
        sign = body["sign"].get<int>();
      }
      return from_quartic(number_at(body, "m2", "potential.quartic"), number_at(body, "g", "potential.quartic"), sign);
    }
    if (name == "double_well") {
      reject_unknown(body, "potential.double_well", {"lambda", "a"});
      return from_double_well(number_at(body, "lambda", "potential.double_well"),
                              number_at(body, "a", "potential.double_well"));
    }
    if (name == "asym_demo") {
      reject_unknown(body, "potential.asym_demo", {});
      return asym_demo<double>();
    }
    fail("potential." + name, "unknown potential form");
  } catch (const DomainError& e) {
    fail("potential", e.what());
  }
}

SolverBlock parse_solver(const json& root) {
  SolverBlock s;
  if (!root.contains("solver"))
    return s;
  const json& b = require_object(root, "solver", "solver");
  reject_unknown(b, "solver",
                 {"N", "optimize_sigma", "centered", "trace_padding", "N_ref", "N_list", "levels", "omega_init",
                  "sigma_init"});
  if (b.contains("N")) {
    s.dim = count(b["N"], "solver.N");
    if (s.dim < 1)
      fail("solver.N", "must be at least 1");
  }
  for (auto [key, flag] : {std::pair{"optimize_sigma", &s.optimize_sigma}, std::pair{"centered", &s.centered}}) {
    if (b.contains(key)) {
      if (!b[key].is_boolean())
        fail(std::string("solver.") + key, "expected true or false");
      *flag = b[key].get<bool>();
    }
  }
  if (b.contains("trace_padding"))
    s.trace_padding = count(b["trace_padding"], "solver.trace_padding");
  if (b.contains("N_ref")) {
    s.ref_dim = count(b["N_ref"], "solver.N_ref");
    if (*s.ref_dim < 1)
      fail("solver.N_ref", "must be at least 1");
  }
  if (b.contains("N_list"))
    s.dims = count_list(b["N_list"], "solver.N_list");
  if (b.contains("levels")) {
    const json& l = b["levels"];
    if (!l.is_array() || l.size() != 2)
      fail("solver.levels", "expected [first, last]");
    s.levels = LevelRange{count(l[0], "solver.levels[0]"), count(l[1], "solver.levels[1]")};
    if (s.levels->first > s.levels->second)
      fail("solver.levels", "first level exceeds last level");
  }
  if (b.contains("omega_init")) {
    s.omega_init = number(b["omega_init"], "solver.omega_init");
    if (!(*s.omega_init > 0))
      fail("solver.omega_init", "must be positive");
  }
  if (b.contains("sigma_init"))
    s.sigma_init = number(b["sigma_init"], "solver.sigma_init");
  if (s.ref_dim && !s.dims.empty() && *s.ref_dim < *std::max_element(s.dims.begin(), s.dims.end()))
    fail("solver.N_ref", "smaller than the largest entry of solver.N_list");
  return s;
}

std::optional<ScanBlock> parse_scan(const json& root) {
  if (!root.contains("trace_scan"))
    return std::nullopt;
  const json& b = require_object(root, "trace_scan", "trace_scan");
  reject_unknown(b, "trace_scan", {"N", "omega_min", "omega_max", "points"});
  ScanBlock s;
  if (!b.contains("N"))
    fail("trace_scan.N", "missing");
  s.dims = count_list(b["N"], "trace_scan.N");
  s.omega_min = number_at(b, "omega_min", "trace_scan");
  s.omega_max = number_at(b, "omega_max", "trace_scan");
  if (!(s.omega_min > 0))
    fail("trace_scan.omega_min", "must be positive");
  if (!(s.omega_max > s.omega_min))
    fail("trace_scan.omega_max", "must exceed omega_min");
  if (b.contains("points"))
    s.points = count(b["points"], "trace_scan.points");
  if (s.points < 2)
    fail("trace_scan.points", "must be at least 2");
  return s;
}

std::optional<EvolutionBlock> parse_evolution(const json& root, const PolynomialPotential<double>& pot) {
  if (!root.contains("evolution"))
    return std::nullopt;
  const json& b = require_object(root, "evolution", "evolution");
  reject_unknown(b, "evolution", {"initial", "width", "width_in_m", "x0", "t_max", "t_step", "snapshots", "grid"});
  EvolutionBlock e;
  if (b.contains("initial")) {
    const json& k = b["initial"];
    const std::string name = k.is_string() ? k.get<std::string>() : "";
    if (name == "centered")
      e.kind = EvolutionBlock::Kind::centered;
    else if (name == "shifted")
      e.kind = EvolutionBlock::Kind::shifted;
    else if (name == "quadrature")
      e.kind = EvolutionBlock::Kind::quadrature;
    else
      fail("evolution.initial", "expected centered, shifted or quadrature");
  }
  if (b.contains("width") == b.contains("width_in_m"))
    fail("evolution.width", "give exactly one of width, width_in_m");
  if (b.contains("width")) {
    e.widths = number_list(b["width"], "evolution.width");
  } else {
    // m is the curvature scale sqrt|V''(0)|
    const double m = std::sqrt(std::abs(2 * pot[2]));
    if (!(m > 0))
      fail("evolution.width_in_m", "potential has no quadratic term to define m");
    for (double k : number_list(b["width_in_m"], "evolution.width_in_m"))
      e.widths.push_back(k * m);
  }
  for (double w : e.widths)
    if (!(w > 0))
      fail("evolution.width", "must be positive");
  if (b.contains("x0"))
    e.x0 = number(b["x0"], "evolution.x0");
  if (e.kind == EvolutionBlock::Kind::centered && e.x0 != 0)
    fail("evolution.x0", "must be 0 for a centered initial state");
  e.t_max = number_at(b, "t_max", "evolution");
  if (!(e.t_max >= 0))
    fail("evolution.t_max", "must be non-negative");
  if (e.t_max > 0) {
    e.t_step = number_at(b, "t_step", "evolution");
    if (!(e.t_step > 0))
      fail("evolution.t_step", "must be positive");
  }
  if (b.contains("snapshots")) {
    if (!b["snapshots"].is_array())
      fail("evolution.snapshots", "expected a list of times");
    for (std::size_t i = 0; i < b["snapshots"].size(); ++i)
      e.snapshots.push_back(number(b["snapshots"][i], "evolution.snapshots[" + std::to_string(i) + "]"));
  }
  if (b.contains("grid")) {
    const json& g = require_object(b, "grid", "evolution.grid");
    reject_unknown(g, "evolution.grid", {"x_min", "x_max", "points"});
    e.x_min = number_at(g, "x_min", "evolution.grid");
    e.x_max = number_at(g, "x_max", "evolution.grid");
    if (g.contains("points"))
      e.grid_points = count(g["points"], "evolution.grid.points");
    if (!(e.x_max > e.x_min))
      fail("evolution.grid.x_max", "must exceed x_min");
    if (e.grid_points < 2)
      fail("evolution.grid.points", "must be at least 2");
  }
  return e;
}

// ---------------------------------------------------------------- output

class CsvWriter {
public:
  CsvWriter(const fs::path& path, std::initializer_list<const char*> columns,
            const std::vector<std::string>& comments = {})
      : out_(path) {
    if (!out_)
      throw ConfigError("cannot write " + path.string());
    for (const auto& c : comments)
      out_ << "# " << c << '\n';
    bool first = true;
    for (const char* c : columns) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

private:
  static std::string cell(double v) { return format_real(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json pms_json(const PmsResult<double>& p, std::size_t dim) {
  return json{{"N", dim},
              {"omega", p.omega},
              {"sigma", p.sigma},
              {"trace", p.trace_value},
              {"residual", p.stationarity_residual}};
}

SpectrumOptions<double> spectrum_options(const SolverBlock& s) {
  SpectrumOptions<double> o;
  o.optimize_sigma = s.optimize_sigma;
  o.trace_padding = s.trace_padding;
  if (s.omega_init)
    o.init = std::pair{*s.omega_init, s.sigma_init.value_or(0.0)};
  return o;
}

void require_dim(const RunConfig& cfg) {
  if (cfg.solver.dim < 1)
    fail("solver.N", "missing");
}

fs::path prepare_output(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  return cfg.output_dir;
}

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

} // namespace

// ---------------------------------------------------------------- config

RunConfig parse_config(const json& j) {
  if (!j.is_object())
    throw ConfigError("config: top level must be an object");
  reject_unknown(j, "", {"potential", "solver", "trace_scan", "evolution", "output"});
  RunConfig cfg{parse_potential(j)};
  cfg.solver = parse_solver(j);
  cfg.scan = parse_scan(j);
  cfg.evolution = parse_evolution(j, cfg.potential);
  if (j.contains("output")) {
    const json& o = require_object(j, "output", "output");
    reject_unknown(o, "output", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o["directory"].is_string() || o["directory"].get<std::string>().empty())
        fail("output.directory", "expected a non-empty path");
      cfg.output_dir = o["directory"].get<std::string>();
    }
    if (o.contains("formats") && o["formats"] != json::array({"csv"}))
      fail("output.formats", "only [\"csv\"] is supported");
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

LevelRange parse_levels(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*\.\.\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    throw ConfigError("--levels: expected a..b, got '" + text + "'");
  LevelRange r{std::stoul(m[1]), std::stoul(m[2])};
  if (r.first > r.second)
    throw ConfigError("--levels: first level exceeds last level");
  return r;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- commands

void cmd_spectrum(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  require_dim(cfg);
  const auto& s = cfg.solver;
  const auto opt = spectrum_options(s);
  const auto dir = prepare_output(cfg);

  if (!s.centered) {
    const LevelRange lv = s.levels.value_or(LevelRange{0, s.dim - 1});
    if (lv.second >= s.dim)
      fail("solver.levels", "level " + std::to_string(lv.second) + " not below N = " + std::to_string(s.dim));
    const auto r = solve_spectrum(cfg.potential, s.dim, opt);
    CsvWriter csv(dir / "levels.csv", {"n", "E_n"});
    for (std::size_t n = lv.first; n <= lv.second; ++n)
      csv.row(n, r.energy(n));
    write_json(dir / "pms.json", pms_json(r.pms, s.dim));
    log << "spectrum: N=" << s.dim << " omega=" << format_real(r.pms.omega) << " sigma=" << format_real(r.pms.sigma)
        << " E_0=" << format_real(r.energy(0)) << '\n';
    return;
  }

  // one centered block per requested level
  if (!s.levels)
    fail("solver.levels", "required for centered solves");
  const LevelRange lv = *s.levels;
  const std::size_t count = lv.second - lv.first + 1;
  std::vector<std::optional<SpectrumReport<double>>> runs(count);
  detail::parallel_for(count, threads,
                       [&](std::size_t i) { runs[i] = solve_centered(cfg.potential, lv.first + i, s.dim, opt); });
  CsvWriter csv(dir / "levels.csv", {"n", "E_n"});
  json blocks = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& r = *runs[i];
    csv.row(lv.first + i, r.energy(lv.first + i));
    auto entry = pms_json(r.pms, s.dim);
    entry["level"] = lv.first + i;
    entry["center"] = r.first_level();
    blocks.push_back(entry);
  }
  write_json(dir / "pms.json", count == 1 ? blocks[0] : json{{"blocks", blocks}});
  log << "spectrum: " << count << " centered block(s) of N=" << s.dim << '\n';
}

void cmd_trace_scan(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  if (!cfg.scan)
    fail("trace_scan", "missing");
  const auto& sc = *cfg.scan;
  const auto dir = prepare_output(cfg);
  PmsOptions<double> po;
  po.optimize_sigma = cfg.solver.optimize_sigma;
  po.trace_padding = cfg.solver.trace_padding;
  if (cfg.solver.omega_init)
    po.init = std::pair{*cfg.solver.omega_init, cfg.solver.sigma_init.value_or(0.0)};

  struct Point {
    double omega, value;
    int pms;
  };
  std::vector<std::vector<Point>> tables(sc.dims.size());
  std::vector<PmsResult<double>> pms(sc.dims.size());
  detail::parallel_for(sc.dims.size(), threads, [&](std::size_t i) {
    const std::size_t n = sc.dims[i];
    pms[i] = pms_optimize(cfg.potential, n, po);
    const std::size_t terms = n + cfg.solver.trace_padding;
    const double lo = std::log(sc.omega_min), hi = std::log(sc.omega_max);
    auto& tab = tables[i];
    for (std::size_t k = 0; k < sc.points; ++k) {
      const double om = k + 1 == sc.points ? sc.omega_max : std::exp(lo + (hi - lo) * k / (sc.points - 1));
      tab.push_back({om, trace(cfg.potential, BasisConfig<double>{terms, om, pms[i].sigma}) / terms, 0});
    }
    const double om = pms[i].omega;
    if (om >= sc.omega_min && om <= sc.omega_max) {
      const auto at = std::lower_bound(tab.begin(), tab.end(), om, [](const Point& p, double w) { return p.omega < w; });
      tab.insert(at, {om, trace(cfg.potential, BasisConfig<double>{terms, om, pms[i].sigma}) / terms, 1});
    }
  });

  CsvWriter csv(dir / "trace_scan.csv", {"N", "omega", "trace_over_N", "pms"});
  json summary = json::array();
  for (std::size_t i = 0; i < sc.dims.size(); ++i) {
    const double om = pms[i].omega;
    if (om < sc.omega_min || om > sc.omega_max)
      log << "warning: trace-scan N=" << sc.dims[i] << ": PMS point omega=" << format_real(om)
          << " lies outside the scanned range [" << format_real(sc.omega_min) << ", " << format_real(sc.omega_max)
          << "]\n";
    for (const auto& p : tables[i])
      csv.row(sc.dims[i], p.omega, p.value, p.pms);
    summary.push_back(pms_json(pms[i], sc.dims[i]));
  }
  write_json(dir / "pms.json", summary);
  log << "trace-scan: " << sc.dims.size() << " dimension(s), " << sc.points << " points each\n";
}

void cmd_evolve(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  require_dim(cfg);
  if (!cfg.evolution)
    fail("evolution", "missing");
  const auto& ev = *cfg.evolution;
  const auto dir = prepare_output(cfg);
  const auto r = solve_spectrum(cfg.potential, cfg.solver.dim, spectrum_options(cfg.solver));
  const auto& basis = r.solution.config;
  const auto times = uniform_times(ev.t_max, ev.t_step);
  write_json(dir / "pms.json", pms_json(r.pms, cfg.solver.dim));

  const bool sweep = ev.widths.size() > 1;
  for (std::size_t w = 0; w < ev.widths.size(); ++w) {
    const InitialGaussian<double> g{ev.widths[w], ev.x0};
    std::vector<double> c;
    switch (ev.kind) {
    case EvolutionBlock::Kind::centered:
      c = project_centered_gaussian(g, basis);
      break;
    case EvolutionBlock::Kind::shifted:
      c = project_shifted_gaussian(g, basis);
      break;
    case EvolutionBlock::Kind::quadrature:
      c = project_by_quadrature<double>(g, basis);
      break;
    }
    const auto st = make_evolution(c, r.solution);
    const std::string tag = sweep ? "_mu" + std::to_string(w) : "";
    const std::vector<std::string> header = {
        "truncation_loss=" + format_real(st.truncation_loss()),
        "mu=" + format_real(g.width) + " x0=" + format_real(g.x0) + " N=" + std::to_string(basis.dim) +
            " omega=" + format_real(basis.omega) + " sigma=" + format_real(basis.sigma)};
    CsvWriter csv(dir / ("observables" + tag + ".csv"), {"t", "x_mean", "x2_mean", "sqrt_x2"}, header);
    for (const auto& row : observables(st, std::span<const double>(times), threads))
      csv.row(row.t, row.x_mean, row.x2_mean, row.sqrt_x2);

    if (!ev.snapshots.empty()) {
      std::vector<double> xs(ev.grid_points);
      for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = ev.x_min + (ev.x_max - ev.x_min) * double(i) / double(xs.size() - 1);
      for (double t : ev.snapshots) {
        const auto psi = st.wavefunction(xs, t);
        CsvWriter snap(dir / ("wavefunction" + tag + "_t" + time_label(t) + ".csv"), {"x", "re", "im", "abs2"});
        for (std::size_t i = 0; i < xs.size(); ++i)
          snap.row(xs[i], psi[i].real(), psi[i].imag(), std::norm(psi[i]));
      }
    }
    log << "evolve: mu=" << format_real(g.width) << " truncation_loss=" << format_real(st.truncation_loss()) << '\n';
  }
}

void cmd_convergence(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  const auto& s = cfg.solver;
  if (s.dims.empty())
    fail("solver.N_list", "missing");
  const auto dir = prepare_output(cfg);
  const LevelRange lv = s.levels.value_or(LevelRange{0, 0});
  std::vector<std::size_t> levels;
  for (std::size_t n = lv.first; n <= lv.second; ++n)
    levels.push_back(n);
  const std::size_t ref = s.ref_dim.value_or(default_reference_dim(s.dims));
  const auto r = convergence_study<double>(cfg.potential, levels, s.dims, ref, spectrum_options(s), threads);
  CsvWriter csv(dir / "convergence.csv", {"N", "n", "delta"}, {"N_ref=" + std::to_string(ref)});
  for (const auto& row : r.convergence)
    csv.row(row.dim, row.level, row.delta);
  json j = pms_json(r.pms, ref);
  j["by_N"] = json::array();
  for (const auto& p : r.pms_by_dim)
    j["by_N"].push_back({{"N", p.dim}, {"omega", p.omega}, {"sigma", p.sigma}});
  write_json(dir / "pms.json", j);
  log << "convergence: " << r.convergence.size() << " rows against N_ref=" << ref << '\n';
}

// ---------------------------------------------------------------- entry

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational oscillator-basis spectra and wave-packet evolution"};
  app.require_subcommand(1);
  std::string config_path, out_dir, levels;
  unsigned threads = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--levels", levels, "level range a..b, inclusive");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto* spectrum = app.add_subcommand("spectrum", "PMS frequency, diagonalization, levels.csv and pms.json");
  auto* scan = app.add_subcommand("trace-scan", "trace per basis function over a log grid of Omega");
  auto* evolve = app.add_subcommand("evolve", "Gaussian wave-packet observables");
  auto* conv = app.add_subcommand("convergence", "level errors against a reference dimension");
  for (auto* sub : {spectrum, scan, evolve, conv})
    add_common(sub);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    auto cfg = load_config(config_path);
    if (!out_dir.empty())
      cfg.output_dir = out_dir;
    if (!levels.empty())
      cfg.solver.levels = parse_levels(levels);
    if (spectrum->parsed())
      cmd_spectrum(cfg, threads, err);
    else if (scan->parsed())
      cmd_trace_scan(cfg, threads, err);
    else if (evolve->parsed())
      cmd_evolve(cfg, threads, err);
    else
      cmd_convergence(cfg, threads, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

} // namespace varosc::cli
