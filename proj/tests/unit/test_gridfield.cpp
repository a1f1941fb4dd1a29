#include <doctest.h>

#include <cmath>
#include <numbers>

#include "surfrec/gridfield.hpp"

using namespace surfrec;

namespace {

double max_abs_diff(const GridField<double>& f, const GridField<double>& g) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f.values()[k] - g.values()[k]));
  return m;
}

}  // namespace

TEST_CASE("GridSpec validation") {
  CHECK_THROWS_AS(GridField<double>(GridSpec{0, 0, 0.0, 5, 5}), ValidationError);
  CHECK_THROWS_AS(GridField<double>(GridSpec{0, 0, 0.1, 2, 5}), ValidationError);
  CHECK_NOTHROW(GridField<double>(GridSpec{0, 0, 0.1, 3, 3}));
  const GridSpec s = GridSpec::unit(16, -0.5, 0.25);
  CHECK(s.nx == 17);
  CHECK(s.x_max() == doctest::Approx(0.5));
  CHECK(s.center() == GridIndex{8, 8});
}

TEST_CASE("partial: constants, affine exactness, linearity") {
  const GridSpec s{0.3, -0.2, 0.1, 7, 5};
  const auto c = GridField<double>(s, 3.5);
  CHECK(norm_max(partial(c, Axis::x)) == 0.0);
  CHECK(norm_max(partial(c, Axis::y)) == 0.0);

  const auto fx = GridField<double>::sample(s, [](double x, double) { return x; });
  const auto d = partial(fx, Axis::x);
  for (double v : d.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
  // one-sided stencils combine 4x - 3x - x, exact only up to rounding
  CHECK(norm_max(partial(fx, Axis::y)) <= 1e-13);

  const auto g = GridField<double>::sample(s, [](double x, double y) { return std::sin(3 * x * y); });
  const auto f = GridField<double>::sample(s, [](double x, double y) { return x * x * y + std::cos(y); });
  for (Axis a : {Axis::x, Axis::y}) {
    const auto lhs = partial(2.5 * f + g, a);
    const auto rhs = 2.5 * partial(f, a) + partial(g, a);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("partial: second-order convergence on sin x (Richardson)") {
  auto error_at = [](int n) {
    const GridSpec s = GridSpec::unit(n);
    const auto f = GridField<double>::sample(s, [](double x, double) { return std::sin(x); });
    const auto exact = GridField<double>::sample(s, [](double x, double) { return std::cos(x); });
    return max_abs_diff(partial(f, Axis::x), exact);
  };
  const double e1 = error_at(32);
  const double e2 = error_at(64);
  const double order = std::log2(e1 / e2);
  CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  // C estimated from the coarse level bounds the fine one.
  const double c = e1 * 32 * 32;
  CHECK(e2 <= c / (64.0 * 64.0) * 1.1);
}

TEST_CASE("second_partial and mixed partials") {
  const GridSpec s = GridSpec::unit(32);
  const auto q = GridField<double>::sample(s, [](double x, double y) { return x * x + 3 * x * y; });
  const auto field = second_partial(q, Axis::x);
  for (double v : field.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));

  const auto f = GridField<double>::sample(s, [](double x, double y) { return std::exp(x) * std::sin(2 * y); });
  const auto m12 = restrict_interior(partial(partial(f, Axis::x), Axis::y), 2);
  const auto m21 = restrict_interior(partial(partial(f, Axis::y), Axis::x), 2);
  CHECK(norm_max(m12 - m21) <= 1.0 * s.h * s.h);
}

TEST_CASE("restrict_interior") {
  const GridSpec s{1.0, 2.0, 0.5, 10, 10};
  const auto f = GridField<double>::sample(s, [](double x, double y) { return x + 10 * y; });
  CHECK(restrict_interior(f, 0).spec() == s);
  const auto r = restrict_interior(f, 2);
  CHECK(r.nx() == 6);
  CHECK(r.ny() == 6);
  CHECK(r.spec().x0 == doctest::Approx(2.0));
  CHECK(r.spec().y0 == doctest::Approx(3.0));
  CHECK(r(0, 0) == f(2, 2));
  CHECK_THROWS_AS(restrict_interior(f, 4), ValidationError);
  CHECK_THROWS_AS(restrict_interior(f, -1), ValidationError);
}

TEST_CASE("discrete norms") {
  const GridSpec s = GridSpec::unit(128);
  const GridField<double> zero(s);
  CHECK(norm_l2(zero) == 0.0);
  CHECK(norm_w12(zero) == 0.0);
  CHECK(norm_w22(zero) == 0.0);

  CHECK(norm_l2(GridField<double>(GridSpec::unit(512), 1.0)) == doctest::Approx(1.0).epsilon(0.005));

  // closed-form integrals for sin(pi x) sin(pi y) on the unit square
  const double pi = std::numbers::pi;
  const auto f = GridField<double>::sample(s, [pi](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  const double l2 = 0.5;
  const double w12 = std::sqrt(0.25 + pi * pi / 2.0);
  const double w22 = std::sqrt(0.25 + pi * pi / 2.0 + pi * pi * pi * pi);
  CHECK(norm_l2(f) == doctest::Approx(l2).epsilon(0.01));
  CHECK(norm_w12(f) == doctest::Approx(w12).epsilon(0.01));
  CHECK(norm_w22(f) == doctest::Approx(w22).epsilon(0.01));
  CHECK(norm_w22(f) >= norm_w12(f));
  CHECK(norm_w12(f) >= norm_l2(f));

  const auto v = GridField<Vec3d>::sample(GridSpec::unit(8), [](double x, double y) { return Vec3d(x, y, x * y); });
  CHECK(norm_w22(v) >= norm_w12(v));
  CHECK(norm_w12(v) >= norm_l2(v));
}
