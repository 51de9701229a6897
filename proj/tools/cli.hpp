#ifndef VAROSC_TOOLS_CLI_HPP
#define VAROSC_TOOLS_CLI_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "varosc/potential.hpp"

namespace varosc::cli {

/// Bad or missing configuration. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

using LevelRange = std::pair<std::size_t, std::size_t>; // inclusive

struct SolverBlock {
  std::size_t dim = 0;
  bool optimize_sigma = false;
  bool centered = false;
  std::size_t trace_padding = 0;
  std::optional<std::size_t> ref_dim;
  std::vector<std::size_t> dims;
  std::optional<LevelRange> levels;
  std::optional<double> omega_init;
  std::optional<double> sigma_init;
};

struct ScanBlock {
  std::vector<std::size_t> dims;
  double omega_min = 0;
  double omega_max = 0;
  std::size_t points = 200;
};

struct EvolutionBlock {
  enum class Kind { centered, shifted, quadrature };
  Kind kind = Kind::centered;
  /// Absolute widths mu; one run per entry.
  std::vector<double> widths;
  double x0 = 0;
  double t_max = 0;
  double t_step = 0;
  std::vector<double> snapshots;
  double x_min = -10;
  double x_max = 10;
  std::size_t grid_points = 201;
};

struct RunConfig {
  PolynomialPotential<double> potential;
  SolverBlock solver;
  std::optional<ScanBlock> scan;
  std::optional<EvolutionBlock> evolution;
  std::filesystem::path output_dir = ".";
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// "a..b", inclusive.
LevelRange parse_levels(const std::string& text);

/// Shortest-exact decimal form: 17 significant digits.
std::string format_real(double v);

void cmd_spectrum(const RunConfig& cfg, unsigned threads, std::ostream& log);
void cmd_trace_scan(const RunConfig& cfg, unsigned threads, std::ostream& log);
void cmd_evolve(const RunConfig& cfg, unsigned threads, std::ostream& log);
void cmd_convergence(const RunConfig& cfg, unsigned threads, std::ostream& log);

/// Full command line (args[0] is the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace varosc::cli

#endif
