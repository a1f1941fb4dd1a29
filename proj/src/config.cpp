#include "surfrec/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace surfrec {

using nlohmann::json;

namespace {

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
    throw ValidationError(std::string("cannot parse ") + what + " '" + std::string(text) + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::string_view rest(text);
  while (true) {
    const std::size_t comma = rest.find(',');
    out.push_back(parse_number<T>(rest.substr(0, comma), what));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
void read_key(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <typename T>
void read_key(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    dst.reset();
    return;
  }
  T v{};
  read_key(j, key, v);
  dst = v;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be a positive number");
  };
  positive(lambda_min, "lambda_min");
  positive(tol_skew, "tol_skew");
  positive(degeneracy_floor, "degeneracy_floor");
  if (n < 2) throw ValidationError("n must be at least 2");
  for (int v : ns)
    if (v < 2) throw ValidationError("every entry of ns must be at least 2");
  for (double v : ks)
    if (!(v > 0.0)) throw ValidationError("every entry of ks must be positive");
  if (margin < 0) throw ValidationError("margin must be non-negative");
  if (threads < 1) throw ValidationError("threads must be at least 1");
  if (quadrature != "lie" && quadrature != "trapezoid")
    throw ValidationError("quadrature must be 'lie' or 'trapezoid'");
  if (format != "bin" && format != "csv") throw ValidationError("format must be 'bin' or 'csv'");
}

CoefficientOptions RunConfig::coefficient_options() const {
  CoefficientOptions o;
  o.lambda_min = lambda_min;
  o.tol_skew = tol_skew;
  return o;
}

ReconstructOptions RunConfig::reconstruct_options() const {
  ReconstructOptions o;
  o.coefficients = coefficient_options();
  o.margin = margin;
  o.degeneracy_floor = degeneracy_floor;
  o.threads = threads;
  o.quadrature = quadrature == "trapezoid" ? Quadrature::trapezoid : Quadrature::lie;
  return o;
}

void apply_config_json(RunConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const char* known[] = {"n",      "x0",     "y0",      "margin",  "lambda_min", "tol_skew",
                                "degeneracy_floor", "threads", "quadrature", "case",    "params",
                                "ns",     "ks",     "family",  "a",       "b",          "omega1",
                                "omega2", "out",    "report",  "mesh",    "format"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown config key '" + key + "'");
  }
  read_key(j, "n", cfg.n);
  read_key(j, "x0", cfg.x0);
  read_key(j, "y0", cfg.y0);
  read_key(j, "margin", cfg.margin);
  read_key(j, "lambda_min", cfg.lambda_min);
  read_key(j, "tol_skew", cfg.tol_skew);
  read_key(j, "degeneracy_floor", cfg.degeneracy_floor);
  read_key(j, "threads", cfg.threads);
  read_key(j, "quadrature", cfg.quadrature);
  read_key(j, "case", cfg.case_name);
  read_key(j, "params", cfg.params);
  read_key(j, "ns", cfg.ns);
  read_key(j, "ks", cfg.ks);
  read_key(j, "family", cfg.family);
  read_key(j, "a", cfg.input_a);
  read_key(j, "b", cfg.input_b);
  read_key(j, "omega1", cfg.input_omega1);
  read_key(j, "omega2", cfg.input_omega2);
  read_key(j, "out", cfg.out_dir);
  read_key(j, "report", cfg.report);
  read_key(j, "mesh", cfg.mesh);
  read_key(j, "format", cfg.format);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  apply_config_json(cfg, ss.str());
}

std::string config_to_json(const RunConfig& cfg, int indent) {
  json j;
  j["n"] = cfg.n;
  j["x0"] = cfg.x0 ? json(*cfg.x0) : json(nullptr);
  j["y0"] = cfg.y0 ? json(*cfg.y0) : json(nullptr);
  j["margin"] = cfg.margin;
  j["lambda_min"] = cfg.lambda_min;
  j["tol_skew"] = cfg.tol_skew;
  j["degeneracy_floor"] = cfg.degeneracy_floor;
  j["threads"] = cfg.threads;
  j["quadrature"] = cfg.quadrature;
  j["case"] = cfg.case_name;
  j["params"] = cfg.params;
  j["ns"] = cfg.ns;
  j["ks"] = cfg.ks;
  j["family"] = cfg.family;
  j["a"] = cfg.input_a;
  j["b"] = cfg.input_b;
  j["omega1"] = cfg.input_omega1;
  j["omega2"] = cfg.input_omega2;
  j["out"] = cfg.out_dir;
  j["report"] = cfg.report;
  j["mesh"] = cfg.mesh;
  j["format"] = cfg.format;
  return j.dump(indent);
}

std::vector<int> parse_int_list(const std::string& text) { return parse_list<int>(text, "integer"); }

std::vector<double> parse_double_list(const std::string& text) { return parse_list<double>(text, "number"); }

std::pair<std::string, double> parse_param(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("parameter must look like name=value, got '" + text + "'");
  return {text.substr(0, eq), parse_number<double>(std::string_view(text).substr(eq + 1), "parameter value")};
}

}  // namespace surfrec
