#include "surfrec/corpus.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace surfrec::corpus {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleMargin = 0.3;

Mat3d block_extend(const Mat2d& m) {
  Mat3d out = Mat3d::Zero();
  out.topLeftCorner<2, 2>() = m;
  out(2, 2) = 1.0;
  return out;
}

// Symmetric X with S X + X S = C for SPD S.
Mat2d solve_sylvester_sym(const Mat2d& s, const Mat2d& c) {
  Eigen::Matrix3d lhs;
  lhs << 2.0 * s(0, 0), 2.0 * s(0, 1), 0.0,
         s(0, 1), s(0, 0) + s(1, 1), s(0, 1),
         0.0, 2.0 * s(0, 1), 2.0 * s(1, 1);
  const Eigen::Vector3d rhs(c(0, 0), 0.5 * (c(0, 1) + c(1, 0)), c(1, 1));
  const Eigen::Vector3d x = lhs.partialPivLu().solve(rhs);
  Mat2d out;
  out << x(0), x(1), x(1), x(2);
  return out;
}

double param(const CaseParams& p, const std::string& key) { return p.at(key); }

CaseParams merge(const std::string& name, CaseParams defaults, const CaseParams& overrides) {
  for (const auto& [k, v] : overrides) {
    if (!defaults.contains(k)) {
      std::ostringstream os;
      os << "corpus case '" << name << "' has no parameter '" << k << "'";
      throw ValidationError(os.str());
    }
    if (!std::isfinite(v)) throw ValidationError("corpus parameter '" + k + "' is not finite");
    defaults[k] = v;
  }
  return defaults;
}

CorpusCase build(std::string_view name_view, const CaseParams& overrides) {
  const std::string name(name_view);
  if (name == "plane") {
    return {name, merge(name, {}, overrides), {-10, 10, -10, 10}, {-0.5, -0.5}, 1.0,
            [](double x, double y) {
              return SurfaceJet{{x, y, 0}, {1, 0, 0}, {0, 1, 0}, Vec3d::Zero(), Vec3d::Zero(),
                                Vec3d::Zero()};
            }};
  }
  if (name == "cylinder") {
    // Unit-speed circle of curvature k in the first coordinate: a = I,
    // b = diag(-k, 0) with the outward normal.
    const CaseParams p = merge(name, {{"curvature", 1.0}}, overrides);
    const double k = param(p, "curvature");
    if (!(k > 0.0)) throw ValidationError("cylinder curvature must be positive");
    return {name, p, {-10, 10, -10, 10}, {-0.5, -0.5}, 1.0, [k](double x, double y) {
              const double c = std::cos(k * x);
              const double s = std::sin(k * x);
              return SurfaceJet{{c / k, s / k, y}, {-s, c, 0}, {0, 0, 1}, {-k * c, -k * s, 0},
                                Vec3d::Zero(), Vec3d::Zero()};
            }};
  }
  if (name == "sphere") {
    const CaseParams p = merge(name, {{"radius", 1.0}}, overrides);
    const double r = param(p, "radius");
    if (!(r > 0.0)) throw ValidationError("sphere radius must be positive");
    const double vmax = kPi / 2 - kPoleMargin;
    const double floor = r * r * std::cos(vmax) * std::cos(vmax);
    return {name, p, {-kPi, kPi, -vmax, vmax}, {-0.5, -0.3}, floor, [r](double u, double v) {
              const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
              return SurfaceJet{r * Vec3d(cu * cv, su * cv, sv),
                                r * Vec3d(-su * cv, cu * cv, 0),
                                r * Vec3d(-cu * sv, -su * sv, cv),
                                r * Vec3d(-cu * cv, -su * cv, 0),
                                r * Vec3d(su * sv, -cu * sv, 0),
                                r * Vec3d(-cu * cv, -su * cv, -sv)};
            }};
  }
  if (name == "torus") {
    const CaseParams p = merge(name, {{"R", 2.0}, {"r", 1.0}}, overrides);
    const double big = param(p, "R");
    const double small = param(p, "r");
    if (!(small > 0.0) || !(big > small)) throw ValidationError("torus needs R > r > 0");
    const double floor = std::min((big - small) * (big - small), small * small);
    return {name, p, {-kPi, kPi, -kPi, kPi}, {0.0, 0.2}, floor,
            [big, small](double u, double v) {
              const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
              const double w = big + small * cv;
              return SurfaceJet{{w * cu, w * su, small * sv},
                                {-w * su, w * cu, 0},
                                {-small * sv * cu, -small * sv * su, small * cv},
                                {-w * cu, -w * su, 0},
                                {small * sv * su, -small * sv * cu, 0},
                                {-small * cv * cu, -small * cv * su, -small * sv}};
            }};
  }
  if (name == "helicoid") {
    const CaseParams p = merge(name, {{"pitch", 1.0}}, overrides);
    const double c = param(p, "pitch");
    if (!(c > 0.0)) throw ValidationError("helicoid pitch must be positive");
    return {name, p, {-kPi, kPi, -2.0, 2.0}, {-0.5, 0.4}, std::min(c * c, 1.0),
            [c](double u, double v) {
              const double cu = std::cos(u), su = std::sin(u);
              return SurfaceJet{{v * cu, v * su, c * u},
                                {-v * su, v * cu, c},
                                {cu, su, 0},
                                {-v * cu, -v * su, 0},
                                {-su, cu, 0},
                                Vec3d::Zero()};
            }};
  }
  if (name == "monge") {
    const CaseParams p = merge(name, {{"amplitude", 0.3}}, overrides);
    const double amp = param(p, "amplitude");
    return {name, p, {-kPi, kPi, -kPi, kPi}, {-0.4, -0.6}, 1.0, [amp](double x, double y) {
              const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
              return SurfaceJet{{x, y, amp * sx * cy},
                                {1, 0, amp * cx * cy},
                                {0, 1, -amp * sx * sy},
                                {0, 0, -amp * sx * cy},
                                {0, 0, -amp * cx * sy},
                                {0, 0, -amp * sx * cy}};
            }};
  }
  std::ostringstream os;
  os << "unknown corpus case '" << name << "'";
  throw ValidationError(os.str());
}

}  // namespace

CorpusCase::CorpusCase(std::string name, CaseParams params, Rect admissible, Vec2d default_origin,
                       double eigen_floor, JetFn jet)
    : name_(std::move(name)),
      params_(std::move(params)),
      admissible_(admissible),
      origin_(default_origin),
      eigen_floor_(eigen_floor),
      jet_(std::move(jet)) {}

GridSpec CorpusCase::grid(int n) const {
  if (n < 2) throw ValidationError("grid needs at least 2 cells per side");
  return GridSpec::unit(n, origin_(0), origin_(1));
}

Vec3d CorpusCase::normal(double x, double y) const {
  const SurfaceJet j = jet_(x, y);
  return j.d1.cross(j.d2).normalized();
}

SymMat2d CorpusCase::a(double x, double y) const {
  const SurfaceJet j = jet_(x, y);
  return {j.d1.dot(j.d1), j.d1.dot(j.d2), j.d2.dot(j.d2)};
}

SymMat2d CorpusCase::b(double x, double y) const {
  const SurfaceJet j = jet_(x, y);
  const Vec3d n = j.d1.cross(j.d2).normalized();
  return {j.d11.dot(n), j.d12.dot(n), j.d22.dot(n)};
}

std::array<SymMat2d, 2> CorpusCase::da(double x, double y) const {
  const SurfaceJet j = jet_(x, y);
  // d_k a_ij = d_ki . d_j + d_i . d_kj
  const std::array<Vec3d, 2> t{j.d1, j.d2};
  const std::array<std::array<Vec3d, 2>, 2> s{{{j.d11, j.d12}, {j.d12, j.d22}}};
  std::array<SymMat2d, 2> out;
  for (int k = 0; k < 2; ++k) {
    auto entry = [&](int p, int q) { return s[k][p].dot(t[q]) + t[p].dot(s[k][q]); };
    out[k] = {entry(0, 0), entry(0, 1), entry(1, 1)};
  }
  return out;
}

Christoffel CorpusCase::christoffel(double x, double y) const {
  const Mat2d inv = a(x, y).matrix().inverse();
  const std::array<SymMat2d, 2> d = da(x, y);
  Christoffel c;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) {
      Vec2d lowered;
      for (int l = 0; l < 2; ++l) lowered(l) = 0.5 * (d[q](p, l) + d[p](q, l) - d[l](p, q));
      const Vec2d raised = inv * lowered;
      for (int k = 0; k < 2; ++k) c.upper[k](p, q) = raised(k);
    }
  return c;
}

Mat3d CorpusCase::G(double x, double y) const {
  Eigen::SelfAdjointEigenSolver<Mat2d> es(a(x, y).matrix());
  const Mat2d root =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return block_extend(root);
}

std::array<Mat3d, 2> CorpusCase::dG(double x, double y) const {
  const Mat2d root = G(x, y).topLeftCorner<2, 2>();
  const std::array<SymMat2d, 2> d = da(x, y);
  std::array<Mat3d, 2> out;
  for (int k = 0; k < 2; ++k) {
    out[k] = Mat3d::Zero();
    out[k].topLeftCorner<2, 2>() = solve_sylvester_sym(root, d[k].matrix());
  }
  return out;
}

std::array<Mat3d, 2> CorpusCase::Gamma(double x, double y) const {
  const Christoffel c = christoffel(x, y);
  const SymMat2d bb = b(x, y);
  const Mat2d bm = bb.matrix() * a(x, y).matrix().inverse();
  std::array<Mat3d, 2> out;
  for (int i = 0; i < 2; ++i) {
    out[i] = Mat3d::Zero();
    for (int k = 0; k < 2; ++k) {
      for (int col = 0; col < 2; ++col) out[i](k, col) = c(k, i, col);
      out[i](k, 2) = -bm(i, k);
      out[i](2, k) = bb(i, k);
    }
  }
  return out;
}

std::array<SkewMat3d, 2> CorpusCase::omega(double x, double y) const {
  const Mat3d g = G(x, y);
  const Mat3d g_inv = g.inverse();
  const std::array<Mat3d, 2> dg = dG(x, y);
  const std::array<Mat3d, 2> gam = Gamma(x, y);
  return {SkewMat3d::from_matrix((g * gam[0] - dg[0]) * g_inv),
          SkewMat3d::from_matrix((g * gam[1] - dg[1]) * g_inv)};
}

Mat3d CorpusCase::frame(double x, double y) const {
  const SurfaceJet j = jet_(x, y);
  Mat3d f;
  f.col(0) = j.d1;
  f.col(1) = j.d2;
  f.col(2) = j.d1.cross(j.d2).normalized();
  return f * G(x, y).inverse();
}

void CorpusCase::require_inside(const GridSpec& grid) const {
  grid.validate();
  if (!admissible_.contains(grid.x0, grid.y0) || !admissible_.contains(grid.x_max(), grid.y_max())) {
    std::ostringstream os;
    os << "grid [" << grid.x0 << ", " << grid.x_max() << "] x [" << grid.y0 << ", "
       << grid.y_max() << "] leaves the admissible domain of corpus case '" << name_ << "'";
    throw ValidationError(os.str());
  }
}

SampledCase CorpusCase::sample(const GridSpec& grid) const {
  require_inside(grid);
  return {GridField<Vec3d>::sample(grid, [&](double x, double y) { return theta(x, y); }),
          GridField<SymMat2d>::sample(grid, [&](double x, double y) { return a(x, y); }),
          GridField<SymMat2d>::sample(grid, [&](double x, double y) { return b(x, y); })};
}

GridField<Christoffel> CorpusCase::sample_christoffel(const GridSpec& grid) const {
  require_inside(grid);
  return GridField<Christoffel>::sample(grid, [&](double x, double y) { return christoffel(x, y); });
}

std::array<GridField<SkewMat3d>, 2> CorpusCase::sample_omega(const GridSpec& grid) const {
  require_inside(grid);
  std::array<GridField<SkewMat3d>, 2> out{GridField<SkewMat3d>(grid), GridField<SkewMat3d>(grid)};
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const auto w = omega(grid.x(i), grid.y(j));
      out[0](i, j) = w[0];
      out[1](i, j) = w[1];
    }
  return out;
}

GridField<Mat3d> CorpusCase::sample_frame(const GridSpec& grid) const {
  require_inside(grid);
  return GridField<Mat3d>::sample(grid, [&](double x, double y) { return frame(x, y); });
}

ConsistencyResult check_consistency(const CorpusCase& c, int points, double fd_step, unsigned seed) {
  std::mt19937 rng(seed);
  const Rect& r = c.admissible();
  // keep the stencil inside the admissible rectangle
  std::uniform_real_distribution<double> ux(r.x_min + 2 * fd_step, r.x_max - 2 * fd_step);
  std::uniform_real_distribution<double> uy(r.y_min + 2 * fd_step, r.y_max - 2 * fd_step);
  ConsistencyResult res;
  const double inv = 0.5 / fd_step;
  for (int k = 0; k < points; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const Vec3d t1 = (c.theta(x + fd_step, y) - c.theta(x - fd_step, y)) * inv;
    const Vec3d t2 = (c.theta(x, y + fd_step) - c.theta(x, y - fd_step)) * inv;
    const SymMat2d a_fd{t1.dot(t1), t1.dot(t2), t2.dot(t2)};
    const SymMat2d a_ex = c.a(x, y);
    res.max_rel_error_a = std::max(
        res.max_rel_error_a, std::sqrt(squared_norm(a_fd - a_ex)) / std::max(1.0, std::sqrt(squared_norm(a_ex))));

    // second derivatives from differences of the tangent fields
    const Vec3d s11 = (c.jet(x + fd_step, y).d1 - c.jet(x - fd_step, y).d1) * inv;
    const Vec3d s22 = (c.jet(x, y + fd_step).d2 - c.jet(x, y - fd_step).d2) * inv;
    const Vec3d s12 = 0.5 * ((c.jet(x, y + fd_step).d1 - c.jet(x, y - fd_step).d1) * inv +
                             (c.jet(x + fd_step, y).d2 - c.jet(x - fd_step, y).d2) * inv);
    const Vec3d n = t1.cross(t2).normalized();
    const SymMat2d b_fd{s11.dot(n), s12.dot(n), s22.dot(n)};
    const SymMat2d b_ex = c.b(x, y);
    res.max_rel_error_b = std::max(
        res.max_rel_error_b, std::sqrt(squared_norm(b_fd - b_ex)) / std::max(1.0, std::sqrt(squared_norm(b_ex))));
  }
  res.passed = res.max_rel_error_a <= 1e-6 && res.max_rel_error_b <= 1e-6;
  return res;
}

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names{"plane", "cylinder", "sphere", "torus", "helicoid", "monge"};
  return names;
}

CorpusCase make_case(std::string_view name, const CaseParams& overrides) {
  CorpusCase c = build(name, overrides);
  const ConsistencyResult check = check_consistency(c);
  if (!check.passed) {
    std::ostringstream os;
    os << "corpus case '" << c.name() << "' failed its consistency check (a: "
       << check.max_rel_error_a << ", b: " << check.max_rel_error_b << ")";
    throw ValidationError(os.str());
  }
  return c;
}

FormsCase forms_case(std::string_view name, const CaseParams& overrides) {
  if (name == "incompatible") {
    if (!overrides.empty()) throw ValidationError("case 'incompatible' takes no parameters");
    return {"incompatible", false, [](int n) { return GridSpec::unit(n); },
            [](const GridSpec& g) {
              return SampledCase{GridField<Vec3d>(g, Vec3d::Constant(std::nan(""))),
                                 GridField<SymMat2d>(g, SymMat2d::identity()),
                                 GridField<SymMat2d>(g, SymMat2d::identity())};
            }};
  }
  CorpusCase c = make_case(name, overrides);
  return {c.name(), true, [c](int n) { return c.grid(n); },
          [c](const GridSpec& g) { return c.sample(g); }};
}

}  // namespace surfrec::corpus
