#include <doctest.h>

#include <cmath>

#include "surfrec/compatibility.hpp"

using namespace surfrec;

namespace {

std::array<GridField<SkewMat3d>, 2> constant_pair(const GridSpec& s, const SkewMat3d& w1, const SkewMat3d& w2) {
  return {GridField<SkewMat3d>(s, w1), GridField<SkewMat3d>(s, w2)};
}

CoefficientBundle bundle_for(const std::string& name, int n) {
  const corpus::FormsCase c = corpus::forms_case(name);
  const auto data = c.sample(c.grid(n));
  return build_coefficients(data.a, data.b);
}

double sup_norm(const GridField<Mat3d>& f) {
  double m = 0.0;
  for (const Mat3d& v : f.values()) m = std::max(m, v.norm());
  return m;
}

}  // namespace

TEST_CASE("omega_residual: zero and single constant generator") {
  const GridSpec s = GridSpec::unit(8);
  const auto field = omega_residual(GridField<SkewMat3d>(s), GridField<SkewMat3d>(s));
  for (const Mat3d& r : field.values()) CHECK(r.isZero(0.0));
  const auto w = constant_pair(s, {0.3, -1.2, 0.7}, {});
  // one-sided boundary stencils of a constant leave rounding-level residue
  const auto single = omega_residual(w[0], w[1]);
  for (const Mat3d& r : single.values()) CHECK(r.norm() < 1e-13);
}

TEST_CASE("omega_residual: constant non-commuting pair equals the commutator exactly") {
  const GridSpec s = GridSpec::unit(8);
  const SkewMat3d w1{1.0, 0.0, 0.0}, w2{0.0, 1.0, 0.0};
  const auto w = constant_pair(s, w1, w2);
  const Mat3d m1 = w1.matrix(), m2 = w2.matrix();
  const Mat3d oracle = m1 * m2 - m2 * m1;
  CHECK(!oracle.isZero());
  const auto field = omega_residual(w[0], w[1]);
  for (const Mat3d& r : field.values()) {
    CHECK(r == oracle);
    CHECK(r + r.transpose() == Mat3d::Zero());
  }
}

TEST_CASE("omega_residual: commuting constants give zero up to rounding") {
  const GridSpec s = GridSpec::unit(6);
  const SkewMat3d w1{0.2, -0.4, 0.6};
  const auto w = constant_pair(s, w1, 2.5 * w1);
  const auto field = omega_residual(w[0], w[1]);
  for (const Mat3d& r : field.values()) CHECK(r.norm() < 1e-13);
}

TEST_CASE("omega_residual is antisymmetric on corpus data") {
  const CoefficientBundle b = bundle_for("torus", 16);
  const auto field = omega_residual(b.Omega[0], b.Omega[1]);
  for (const Mat3d& r : field.values()) CHECK((r + r.transpose()).norm() <= 1e-14 * (1.0 + r.norm()));
}

TEST_CASE("gamma_residual: zero and cylinder") {
  const GridSpec s = GridSpec::unit(6);
  const auto zero = gamma_residual(GridField<Mat3d>(s), GridField<Mat3d>(s));
  for (const Mat3d& r : zero.values()) CHECK(r.isZero(0.0));
  const CoefficientBundle b = bundle_for("cylinder", 16);
  CHECK(sup_norm(gamma_residual(b.Gamma[0], b.Gamma[1])) < 1e-13);
}

TEST_CASE("gamma_residual: sphere converges at second order") {
  std::vector<double> r;
  for (int n : {16, 32, 64}) {
    const CoefficientBundle b = bundle_for("sphere", n);
    r.push_back(norm_l2(restrict_interior(gamma_residual(b.Gamma[0], b.Gamma[1]), 2)));
  }
  CHECK(std::log2(r[0] / r[1]) > 1.7);
  CHECK(std::log2(r[1] / r[2]) > 1.7);
}

TEST_CASE("R_Omega = G R_Gamma G^{-1} up to O(h^2)") {
  std::vector<double> gap;
  for (int n : {16, 32, 64}) {
    const CoefficientBundle b = bundle_for("sphere", n);
    const auto ro = omega_residual(b.Omega[0], b.Omega[1]);
    const auto rg = gamma_residual(b.Gamma[0], b.Gamma[1]);
    GridField<Mat3d> d(b.spec());
    for (std::size_t k = 0; k < d.size(); ++k)
      d.values()[k] = ro.values()[k] - b.G.values()[k] * rg.values()[k] * b.G_inv.values()[k];
    gap.push_back(norm_l2(restrict_interior(d, 2)));
  }
  CHECK(gap[2] < gap[1]);
  CHECK(std::log2(gap[0] / gap[1]) > 1.5);
  CHECK(std::log2(gap[1] / gap[2]) > 1.5);
}

TEST_CASE("gcm_residual: flat and cylinder vanish") {
  for (const char* name : {"plane", "cylinder"}) {
    CAPTURE(name);
    const CompatReport r = check_compatibility(bundle_for(name, 16));
    CHECK(r.gauss_residual_max < 1e-12);
    CHECK(r.codazzi_residual_max[0] < 1e-12);
    CHECK(r.codazzi_residual_max[1] < 1e-12);
    CHECK(r.omega_residual_max < 1e-12);
  }
}

TEST_CASE("gcm_residual: a = I, b = I gives Gauss residual -1 and no Codazzi residual") {
  const CoefficientBundle b = bundle_for("incompatible", 16);
  const GcmResidual g = gcm_residual(b);
  for (double v : g.gauss.values()) CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));
  for (int j = 0; j < 2; ++j)
    for (double v : g.codazzi[j].values()) CHECK(std::abs(v) < 1e-14);
  // cross-check: the Omega form also detects the incompatibility
  CHECK(check_compatibility(b).omega_residual_max > 0.5);
}

TEST_CASE("gcm_residual: Codazzi sign convention on the sphere") {
  // With the outward normal b = -a, so d1 b_12 - d2 b_11 = -d2(-cos^2 v) =
  // -2 sin v cos v, which the Christoffel coupling must cancel.
  const CoefficientBundle b = bundle_for("sphere", 64);
  const GcmResidual g = gcm_residual(b);
  const auto c0 = restrict_interior(g.codazzi[0], 2);
  CHECK(norm_max(c0) < 1e-3);
  const auto d2b = partial(b.b, Axis::y);
  double lhs = 0.0;
  for (const SymMat2d& m : d2b.values()) lhs = std::max(lhs, std::abs(m.s11));
  CHECK(lhs > 0.1);
}

TEST_CASE("equivalence study: sphere, cylinder and the incompatible pair") {
  const EquivalenceStudy sphere = equivalence_study(corpus::forms_case("sphere"), {16, 32, 64});
  REQUIRE(sphere.orders.size() == 2);
  for (const auto& o : sphere.orders)
    for (double v : o) CHECK(v >= 1.5);
  for (const EquivalenceRow& r : sphere.rows) {
    CHECK(r.omega_l2 <= 10 * r.h * r.h);
    CHECK(r.gamma_l2 <= 10 * r.h * r.h);
    CHECK(r.gcm_l2 <= 10 * r.h * r.h);
  }

  const EquivalenceStudy cyl = equivalence_study(corpus::forms_case("cylinder"), {16, 32, 64});
  for (const EquivalenceRow& r : cyl.rows) {
    CHECK(r.omega_l2 < 1e-13);
    CHECK(r.gamma_l2 < 1e-13);
    CHECK(r.gcm_l2 < 1e-13);
  }

  const EquivalenceStudy bad = equivalence_study(corpus::forms_case("incompatible"), {16, 32, 64});
  CHECK_FALSE(bad.compatible);
  for (const EquivalenceRow& r : bad.rows) {
    CHECK(r.omega_l2 > 0.5);
    CHECK(r.gcm_l2 > 0.5);
  }
}

TEST_CASE("discrete equivalence: each residual bounds the other through the G conjugation") {
  for (const std::string& name : corpus::case_names()) {
    for (int n : {16, 32}) {
      CAPTURE(name);
      CAPTURE(n);
      const CoefficientBundle b = bundle_for(name, n);
      double g_sup = 0.0, g_inv_sup = 0.0;
      for (std::size_t k = 0; k < b.G.size(); ++k) {
        g_sup = std::max(g_sup, b.G.values()[k].norm());
        g_inv_sup = std::max(g_inv_sup, b.G_inv.values()[k].norm());
      }
      const double kappa = g_sup * g_inv_sup;
      const CompatReport r = check_compatibility(b);
      const double h = b.spec().h;
      CHECK(r.omega_residual_l2 <= kappa * r.gamma_residual_l2 + 10 * h * h);
      CHECK(r.gamma_residual_l2 <= kappa * r.omega_residual_l2 + 10 * h * h);
    }
  }
}

TEST_CASE("interior residuals exclude boundary stencils") {
  const CoefficientBundle b = bundle_for("sphere", 32);
  const auto full = omega_residual(b.Omega[0], b.Omega[1]);
  CHECK(norm_max(restrict_interior(full, 2)) <= norm_max(full));
  CHECK(norm_l2(restrict_interior(full, 2)) <= norm_l2(full));
}
