#pragma once

// Run configuration shared by the CLI subcommands: a JSON file supplies the
// base values, command-line flags override individual fields.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surfrec/reconstruction.hpp"

namespace surfrec {

struct RunConfig {
  /// Cells per side of the unit-square grid used for corpus cases.
  int n = 32;
  /// Optional explicit grid origin; corpus cases use their own default.
  std::optional<double> x0;
  std::optional<double> y0;
  int margin = 2;
  double lambda_min = 1e-6;
  double tol_skew = 1e-8;
  double degeneracy_floor = 1e-8;
  int threads = 1;
  std::string quadrature = "lie";

  std::string case_name;
  std::map<std::string, double> params;
  std::vector<int> ns;
  std::vector<double> ks;
  std::string family = "sphere-radius";

  std::string input_a;
  std::string input_b;
  std::string input_omega1;
  std::string input_omega2;
  std::string out_dir = ".";
  std::string report;
  std::string mesh;
  std::string format = "bin";

  /// Throws ValidationError if a tolerance is not positive or a count is out of range.
  void validate() const;

  ReconstructOptions reconstruct_options() const;
  CoefficientOptions coefficient_options() const;
};

/// Overlays the keys present in a JSON object onto `cfg`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
void apply_config_json(RunConfig& cfg, const std::string& json_text);
void load_config_file(RunConfig& cfg, const std::string& path);

/// Full resolved configuration as a JSON string (stable key order).
std::string config_to_json(const RunConfig& cfg, int indent = 2);

/// "16,32,64" -> {16, 32, 64}
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
/// "radius=2" -> ("radius", 2)
std::pair<std::string, double> parse_param(const std::string& text);

}  // namespace surfrec
