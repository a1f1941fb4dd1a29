#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "surfrec/config.hpp"

using namespace surfrec;

TEST_CASE("defaults validate and map onto solver options") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  const ReconstructOptions o = c.reconstruct_options();
  CHECK(o.coefficients.lambda_min == 1e-6);
  CHECK(o.coefficients.tol_skew == 1e-8);
  CHECK(o.degeneracy_floor == 1e-8);
  CHECK(o.margin == 2);
  CHECK(o.threads == 1);
  CHECK(o.quadrature == Quadrature::lie);
}

TEST_CASE("JSON overlays only the keys it names") {
  RunConfig c;
  apply_config_json(c, R"({"n": 48, "lambda_min": 0.01, "params": {"radius": 2.5}, "ns": [8, 16],
                          "quadrature": "trapezoid", "x0": -0.25})");
  CHECK(c.n == 48);
  CHECK(c.lambda_min == 0.01);
  CHECK(c.params.at("radius") == 2.5);
  CHECK(c.ns == std::vector<int>{8, 16});
  CHECK(c.x0 == -0.25);
  CHECK_FALSE(c.y0.has_value());
  CHECK(c.tol_skew == 1e-8);
  CHECK(c.reconstruct_options().quadrature == Quadrature::trapezoid);
}

TEST_CASE("config round-trips through its JSON form") {
  RunConfig c;
  c.n = 20;
  c.x0 = 0.5;
  c.case_name = "torus";
  c.params = {{"R", 3.0}, {"r", 0.5}};
  c.ks = {1, 2, 4};
  c.format = "csv";
  RunConfig d;
  apply_config_json(d, config_to_json(c));
  CHECK(config_to_json(d) == config_to_json(c));
  const nlohmann::json j = nlohmann::json::parse(config_to_json(c));
  CHECK(j.at("case") == "torus");
  CHECK(j.at("y0").is_null());
}

TEST_CASE("bad configuration is rejected") {
  RunConfig c;
  CHECK_THROWS_AS(apply_config_json(c, R"({"lamda_min": 1})"), ValidationError);
  CHECK_THROWS_AS(apply_config_json(c, R"({"n": "many"})"), ValidationError);
  CHECK_THROWS_AS(apply_config_json(c, "[1, 2]"), ValidationError);
  CHECK_THROWS_AS(apply_config_json(c, "{ broken"), ValidationError);
  CHECK_THROWS_AS(load_config_file(c, "/nonexistent/surfrec.json"), ValidationError);

  auto invalid = [](auto mutate) {
    RunConfig r;
    mutate(r);
    CHECK_THROWS_AS(r.validate(), ValidationError);
  };
  invalid([](RunConfig& r) { r.lambda_min = 0.0; });
  invalid([](RunConfig& r) { r.lambda_min = -1.0; });
  invalid([](RunConfig& r) { r.tol_skew = NAN; });
  invalid([](RunConfig& r) { r.degeneracy_floor = 0.0; });
  invalid([](RunConfig& r) { r.n = 1; });
  invalid([](RunConfig& r) { r.ns = {16, 1}; });
  invalid([](RunConfig& r) { r.ks = {1, -2}; });
  invalid([](RunConfig& r) { r.margin = -1; });
  invalid([](RunConfig& r) { r.threads = 0; });
  invalid([](RunConfig& r) { r.quadrature = "simpson"; });
  invalid([](RunConfig& r) { r.format = "hdf5"; });
}

TEST_CASE("config file loading") {
  const std::filesystem::path p = std::filesystem::temp_directory_path() / "surfrec_test_config.json";
  std::ofstream(p) << R"({"threads": 3, "family": "constant"})";
  RunConfig c;
  load_config_file(c, p.string());
  std::filesystem::remove(p);
  CHECK(c.threads == 3);
  CHECK(c.family == "constant");
}

TEST_CASE("list and parameter parsing") {
  CHECK(parse_int_list("16,32,64") == std::vector<int>{16, 32, 64});
  CHECK(parse_int_list("8") == std::vector<int>{8});
  CHECK(parse_double_list("1,2.5,1e3") == std::vector<double>{1.0, 2.5, 1000.0});
  CHECK_THROWS_AS(parse_int_list("16,x"), ValidationError);
  CHECK_THROWS_AS(parse_int_list("16,,32"), ValidationError);
  CHECK_THROWS_AS(parse_int_list("1.5"), ValidationError);

  const auto p = parse_param("radius=2");
  CHECK(p.first == "radius");
  CHECK(p.second == 2.0);
  CHECK_THROWS_AS(parse_param("radius"), ValidationError);
  CHECK_THROWS_AS(parse_param("=2"), ValidationError);
  CHECK_THROWS_AS(parse_param("radius=two"), ValidationError);
}
