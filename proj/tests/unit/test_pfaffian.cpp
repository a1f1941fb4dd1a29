#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "surfrec/coefficients.hpp"
#include "surfrec/corpus.hpp"
#include "surfrec/pfaffian.hpp"

using namespace surfrec;

namespace {

Mat3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return exp_skew3(SkewMat3d{n(rng), n(rng), n(rng)}).matrix();
}

OmegaPair<3> constant_omega(const GridSpec& s, const Mat3d& w1, const Mat3d& w2) {
  return {GridField<Mat3d>(s, w1), GridField<Mat3d>(s, w2)};
}

Mat3d series_exp(const Mat3d& w) {
  // plain Taylor series, adequate for |w| <= 1
  Mat3d term = Mat3d::Identity(), sum = Mat3d::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * w / k;
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("step_edge: zero generator and constant generator") {
  std::mt19937_64 rng(3);
  const Mat3d p = random_rotation(rng);
  const Mat3d zero = Mat3d::Zero();
  CHECK(step_edge<3>(p, zero, zero, 0.1, Convention::right) == p);
  CHECK(step_edge<3>(p, zero, zero, 0.1, Convention::left) == p);

  const Mat3d w = SkewMat3d{0.4, -0.9, 0.2}.matrix();
  const double h = 1.0 / 16;
  const Mat3d next = step_edge<3>(Mat3d::Identity(), w, w, h, Convention::right);
  CHECK((next - series_exp(h * w)).norm() < 1e-15);
  const Mat3d left = step_edge<3>(Mat3d::Identity(), w, w, h, Convention::left);
  CHECK((left - series_exp(-h * w)).norm() < 1e-15);
}

TEST_CASE("exp_generator: so(2) closed form and general dimension") {
  Eigen::Matrix2d j;
  j << 0, -0.7, 0.7, 0;
  const Eigen::Matrix2d r = exp_generator<2>(j);
  CHECK(r(0, 0) == doctest::Approx(std::cos(0.7)));
  CHECK(r(1, 0) == doctest::Approx(std::sin(0.7)));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::Matrix4d m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = u(rng);
  const Eigen::Matrix4d w = m - m.transpose();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity(), sum = Eigen::Matrix4d::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * w / k;
    sum += term;
  }
  CHECK((exp_generator<4>(w) - sum).norm() < 1e-13);
  CHECK(orthogonality_defect(exp_generator<4>(w)) < 1e-13);
}

TEST_CASE("solve_frame: zero connection gives the base value everywhere") {
  const GridSpec s = GridSpec::unit(8);
  std::mt19937_64 rng(5);
  const Mat3d r0 = random_rotation(rng);
  const FrameField3 f = solve_frame<3>(constant_omega(s, Mat3d::Zero(), Mat3d::Zero()), {2, 3}, r0);
  for (const Mat3d& p : f.P.values()) CHECK(p == r0);
  CHECK(f.diag.projection_count == 0);
}

TEST_CASE("solve_frame: constant Omega_1 reproduces exp(x W)") {
  const GridSpec s = GridSpec::unit(32);
  const Mat3d w = SkewMat3d{0.3, 1.1, -0.5}.matrix();
  const FrameField3 f = solve_frame<3>(constant_omega(s, w, Mat3d::Zero()), {0, 0}, Mat3d::Identity());
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.nx; ++i) CHECK((f.P(i, j) - series_exp(s.x(i) * w)).norm() < 1e-10);
}

TEST_CASE("gradient energy ratio tends to one") {
  const GridSpec s = GridSpec::unit(8);
  const FrameField3 flat = solve_frame<3>(constant_omega(s, Mat3d::Zero(), Mat3d::Zero()), {0, 0}, Mat3d::Identity());
  CHECK(std::isnan(flat.diag.gradient_energy_ratio));

  const Mat3d w = SkewMat3d{0.3, 1.1, -0.5}.matrix();
  const FrameField3 f = solve_frame<3>(constant_omega(GridSpec::unit(32), w, Mat3d::Zero()), {0, 0}, Mat3d::Identity());
  CHECK(f.diag.gradient_energy_ratio == doctest::Approx(1.0).epsilon(1e-3));

  const corpus::CorpusCase c = corpus::make_case("sphere");
  std::vector<double> dev;
  for (int n : {16, 32, 64}) {
    const GridSpec g = c.grid(n);
    const auto data = c.sample(g);
    const FrameField3 fr = solve_frame(build_coefficients(data.a, data.b).Omega, g.center(), Mat3d::Identity());
    dev.push_back(std::abs(fr.diag.gradient_energy_ratio - 1.0));
  }
  CHECK(dev[0] < 0.05);
  CHECK(dev[1] < dev[0]);
  CHECK(dev[2] < dev[1]);
}

TEST_CASE("solve_frame: sphere frame against the analytic F G^{-1}, second order") {
  const corpus::CorpusCase c = corpus::make_case("sphere");
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    const GridSpec s = c.grid(n);
    const auto data = c.sample(s);
    const CoefficientBundle b = build_coefficients(data.a, data.b);
    const auto exact = c.sample_frame(s);
    const GridIndex base = s.center();
    const FrameField3 f = solve_frame(b.Omega, base, exact[base]);
    double e = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) e = std::max(e, (f.P.values()[k] - exact.values()[k]).norm());
    err.push_back(e);
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.25));
  CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("step_edge: O(h^2) global error along a non-grid ray on the sphere") {
  const corpus::CorpusCase c = corpus::make_case("sphere");
  const double alpha = 0.6, length = 0.8;
  const Vec2d p0(-0.4, -0.3), dir(std::cos(alpha), std::sin(alpha));
  auto omega_along = [&](double t) -> Mat3d {
    const Vec2d q = p0 + t * dir;
    const auto w = c.omega(q(0), q(1));
    return dir(0) * w[0].matrix() + dir(1) * w[1].matrix();
  };
  auto integrate = [&](int steps) {
    Mat3d p = Mat3d::Identity();
    const double s = length / steps;
    for (int k = 0; k < steps; ++k) p = step_edge<3>(p, omega_along(k * s), omega_along((k + 1) * s), s, Convention::right);
    return p;
  };
  // fine oracle: product of midpoint exponentials with 100 substeps per coarse step of the finest run
  Mat3d oracle = Mat3d::Identity();
  const int fine = 64 * 100;
  for (int k = 0; k < fine; ++k) {
    const double d = length / fine;
    oracle = oracle * exp_generator<3>(Mat3d(d * omega_along((k + 0.5) * d)));
  }
  std::vector<double> lh, le;
  for (int steps : {8, 16, 32, 64}) {
    lh.push_back(std::log(length / steps));
    le.push_back(std::log((integrate(steps) - oracle).norm()));
  }
  // least-squares line through (log h, log error)
  const double n = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < lh.size(); ++k) {
    sx += lh[k];
    sy += le[k];
    sxx += lh[k] * lh[k];
    sxy += lh[k] * le[k];
    syy += le[k] * le[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
  CHECK(r * r >= 0.99);
}

TEST_CASE("transposition duality: left solve equals transposed right solve") {
  const corpus::CorpusCase c = corpus::make_case("torus");
  const GridSpec s = c.grid(16);
  const auto data = c.sample(s);
  const CoefficientBundle b = build_coefficients(data.a, data.b);
  SolveOptions right, left;
  left.convention = Convention::left;
  const FrameField3 fr = solve_frame(b.Omega, s.center(), Mat3d::Identity(), right);
  const FrameField3 fl = solve_frame(b.Omega, s.center(), Mat3d::Identity(), left);
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK((fl.P.values()[k] - fr.P.values()[k].transpose()).norm() <= 1e-12);
}

TEST_CASE("constant gauge invariance: solve(base R0) = R0 solve(base I)") {
  const corpus::CorpusCase c = corpus::make_case("monge");
  const GridSpec s = c.grid(16);
  const auto data = c.sample(s);
  const CoefficientBundle b = build_coefficients(data.a, data.b);
  std::mt19937_64 rng(19);
  const Mat3d r0 = random_rotation(rng);
  const FrameField3 f1 = solve_frame(b.Omega, {4, 5}, Mat3d::Identity());
  const FrameField3 f2 = solve_frame(b.Omega, {4, 5}, r0);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK((f2.P.values()[k] - r0 * f1.P.values()[k]).norm() <= 1e-13);
}

TEST_CASE("orthogonality is preserved without projection") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 0.3);
  Mat3d p = Mat3d::Identity();
  double worst_step = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Mat3d w0 = SkewMat3d{n(rng), n(rng), n(rng)}.matrix();
    const Mat3d w1 = SkewMat3d{n(rng), n(rng), n(rng)}.matrix();
    const Mat3d q = step_edge<3>(Mat3d::Identity(), w0, w1, 0.05, Convention::right);
    worst_step = std::max(worst_step, orthogonality_defect(q));
    p = step_edge<3>(p, w0, w1, 0.05, Convention::right);
  }
  CHECK(worst_step <= 1e-14);
  CHECK(orthogonality_defect(p) <= 1e-10);
  CHECK(std::abs(p.determinant() - 1.0) <= 1e-10);
}

TEST_CASE("solve_frame diagnostics and determinism across thread counts") {
  const corpus::CorpusCase c = corpus::make_case("helicoid");
  const GridSpec s = c.grid(32);
  const auto data = c.sample(s);
  const CoefficientBundle b = build_coefficients(data.a, data.b);
  SolveOptions one, four;
  four.threads = 4;
  const FrameField3 f1 = solve_frame(b.Omega, s.center(), Mat3d::Identity(), one);
  const FrameField3 f4 = solve_frame(b.Omega, s.center(), Mat3d::Identity(), four);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(f1.P.values()[k] == f4.P.values()[k]);
  CHECK(f1.diag.node_count == s.size());
  CHECK(f1.diag.max_orthogonality_defect <= 1e-8);
  CHECK(f1.diag.max_det_deviation <= 1e-8);
  CHECK(f1.diag.projection_count == f4.diag.projection_count);
  CHECK(f1.P[s.center()] == Mat3d::Identity());

  // a zero threshold forces a projection at every non-base node that is
  // not already exactly orthogonal; the count must reflect that
  SolveOptions eager;
  eager.projection_threshold = 0.0;
  const FrameField3 fe = solve_frame(b.Omega, s.center(), Mat3d::Identity(), eager);
  CHECK(fe.diag.projection_count > 0);
  CHECK(fe.diag.projection_count < s.size());
}

TEST_CASE("solve_frame rejects bad inputs") {
  const GridSpec s = GridSpec::unit(4);
  const auto w = constant_omega(s, Mat3d::Zero(), Mat3d::Zero());
  CHECK_THROWS_AS(solve_frame<3>(w, {9, 0}, Mat3d::Identity()), ValidationError);
  CHECK_THROWS_AS(solve_frame<3>(w, {0, 0}, Mat3d(2.0 * Mat3d::Identity())), ValidationError);
  CHECK_THROWS_AS(project_rotation<3>(Mat3d(-Mat3d::Identity())), DegeneracyError);
  CHECK_THROWS_AS(project_rotation<4>(Eigen::Matrix4d::Zero()), DegeneracyError);
}

TEST_CASE("so(2): abelian Pfaffian system solved exactly") {
  // Omega_i = d_i phi J with phi quadratic: P = rot(phi - phi(base)), and
  // the midpoint rule integrates the linear angle density exactly.
  const GridSpec s = GridSpec::unit(16, -0.5, -0.5);
  Eigen::Matrix2d j;
  j << 0, -1, 1, 0;
  auto phi = [](double x, double y) { return x * x + x * y - y * y; };
  const OmegaPair<2> w{GridField<Eigen::Matrix2d>::sample(s, [&](double x, double y) -> Eigen::Matrix2d { return (2 * x + y) * j; }),
                       GridField<Eigen::Matrix2d>::sample(s, [&](double x, double y) -> Eigen::Matrix2d { return (x - 2 * y) * j; })};
  const GridIndex base = s.center();
  const FrameField<2> f = solve_frame<2>(w, base, Eigen::Matrix2d::Identity());
  const double p0 = phi(s.x(base.i), s.y(base.j));
  for (int jj = 0; jj < s.ny; ++jj)
    for (int i = 0; i < s.nx; ++i) {
      const double t = phi(s.x(i), s.y(jj)) - p0;
      CHECK(f.P(i, jj)(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-12));
      CHECK(f.P(i, jj)(1, 0) == doctest::Approx(std::sin(t)).epsilon(1e-12));
    }
  CHECK(plaquette_holonomy<2>(w).max < 1e-13);
}

TEST_CASE("plaquette_holonomy: zero, commuting and non-commuting constants") {
  const GridSpec s = GridSpec::unit(64);
  CHECK(plaquette_holonomy<3>(constant_omega(s, Mat3d::Zero(), Mat3d::Zero())).max == 0.0);

  const SkewMat3d a{0.3, -0.2, 0.9};
  const auto commuting = constant_omega(s, a.matrix(), (1.7 * a).matrix());
  CHECK(plaquette_holonomy<3>(commuting).max <= 1e-12);

  const SkewMat3d w1{1.0, 0.0, 0.0}, w2{0.0, 1.0, 0.0};
  const HolonomyReport rep = plaquette_holonomy<3>(constant_omega(s, w1.matrix(), w2.matrix()));
  CHECK(rep.cells_x == 64);
  CHECK(rep.angle.size() == 64u * 64u);
  // fine-substep loop oracle
  const double h = s.h;
  const int sub = 100;
  Mat3d loop = Mat3d::Identity();
  const std::array<Mat3d, 4> legs{w1.matrix(), w2.matrix(), Mat3d(-w1.matrix()), Mat3d(-w2.matrix())};
  for (const Mat3d& leg : legs)
    for (int k = 0; k < sub; ++k) loop = loop * series_exp((h / sub) * leg);
  const double oracle = rotation_angle<3>(loop);
  CHECK(rep(10, 20) == doctest::Approx(oracle).epsilon(1e-9));
  const SkewMat3d comm = SkewMat3d::from_matrix(w1.matrix() * w2.matrix() - w2.matrix() * w1.matrix());
  const double scale = std::sqrt(comm.w1 * comm.w1 + comm.w2 * comm.w2 + comm.w3 * comm.w3);
  CHECK(rep.max == doctest::Approx(h * h * scale).epsilon(0.01));
}

TEST_CASE("plaquette_holonomy: compatible corpus data is third order per cell") {
  const corpus::CorpusCase c = corpus::make_case("sphere");
  std::vector<double> m;
  for (int n : {16, 32, 64}) {
    const auto data = c.sample(c.grid(n));
    const CoefficientBundle b = build_coefficients(data.a, data.b);
    m.push_back(plaquette_holonomy(b.Omega).max);
  }
  CHECK(std::log2(m[0] / m[1]) >= 2.0);
  CHECK(std::log2(m[1] / m[2]) >= 2.0);
}

TEST_CASE("relate_solutions") {
  const corpus::CorpusCase c = corpus::make_case("sphere");
  const GridSpec s = c.grid(16);
  const auto data = c.sample(s);
  const CoefficientBundle b = build_coefficients(data.a, data.b);
  const FrameField3 f = solve_frame(b.Omega, s.center(), Mat3d::Identity());

  const Relation<3> same = relate_solutions(f, f);
  CHECK((same.C - Mat3d::Identity()).norm() < 1e-14);
  CHECK(same.spread < 1e-14);

  // left convention: P_a = P_b R0 for every node
  std::mt19937_64 rng(29);
  const Mat3d r0 = random_rotation(rng);
  SolveOptions left;
  left.convention = Convention::left;
  FrameField3 pb = solve_frame(b.Omega, s.center(), Mat3d::Identity(), left);
  FrameField3 pa = pb;
  for (Mat3d& p : pa.P.values()) p = p * r0;
  const Relation<3> rel = relate_solutions(pa, pb);
  CHECK((rel.C - r0).norm() < 1e-12);
  CHECK(rel.spread <= 1e-12);

  // right convention, two base nodes with consistent base values
  std::vector<double> spread;
  for (int n : {16, 32, 64}) {
    const GridSpec g = c.grid(n);
    const auto d = c.sample(g);
    const CoefficientBundle bb = build_coefficients(d.a, d.b);
    const FrameField3 fa = solve_frame(bb.Omega, {0, 0}, Mat3d::Identity());
    const FrameField3 fb = solve_frame(bb.Omega, {g.nx - 1, g.ny - 1}, Mat3d::Identity());
    const Relation<3> r = relate_solutions(fa, fb);
    CHECK(r.spread <= 10 * g.h * g.h);
    spread.push_back(r.spread);
  }
  CHECK(spread[2] < spread[1]);
  CHECK_THROWS_AS(relate_solutions(f, pb), ValidationError);
}
