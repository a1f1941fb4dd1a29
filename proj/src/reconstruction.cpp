#include "surfrec/reconstruction.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "surfrec/poincare.hpp"
#include "surfrec/sweep.hpp"

namespace surfrec {

namespace {

// Integrals of exp(tX) and t exp(tX) over [0, 1] for X in so(3):
//   phi = I + c_a X + c_b X^2,   psi = I/2 + c_c X + c_d X^2.
struct EdgeWeights {
  Mat3d phi;
  Mat3d psi;
};

EdgeWeights edge_weights(const Mat3d& x) {
  const SkewMat3d w = SkewMat3d::from_matrix(x);
  const double t2 = w.w1 * w.w1 + w.w2 * w.w2 + w.w3 * w.w3;
  const double t = std::sqrt(t2);
  double ca, cb, cc, cd;
  if (t < 1e-3) {
    ca = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    cb = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    cc = 1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0;
    cd = 1.0 / 8.0 - t2 / 144.0 + t2 * t2 / 5760.0;
  } else {
    const double s = std::sin(t);
    const double c = std::cos(t);
    ca = (1.0 - c) / t2;
    cb = (t - s) / (t2 * t);
    cc = (s - t * c) / (t2 * t);
    cd = (0.5 - (t * s + c - 1.0) / t2) / t2;
  }
  const Mat3d x2 = x * x;
  return {Mat3d::Identity() + ca * x + cb * x2, 0.5 * Mat3d::Identity() + cc * x + cd * x2};
}

GridField<Vec3d> integrate_lie(const FrameField3& frame, const OmegaPair<3>& omega, const GridField<Mat3d>& G,
                               GridIndex base, const Vec3d& base_theta, int threads) {
  GridField<Vec3d> theta(G.spec());
  theta[base] = base_theta;
  sweep_tree(theta, base, threads, [&](const Vec3d& prev, const SweepEdge& e) -> Vec3d {
    const int col = e.axis == Axis::x ? 0 : 1;
    const auto& w = omega[col];
    const Mat3d x = (0.5 * e.step) * (w[e.from] + w[e.to]);
    const EdgeWeights k = edge_weights(x);
    const Vec3d g0 = G[e.from].col(col);
    const Vec3d g1 = G[e.to].col(col);
    return prev + e.step * (frame.P[e.from] * (k.phi * g0 + k.psi * (g1 - g0)));
  });
  return theta;
}

FormErrors form_errors(const FundamentalForms& rec, const GridField<SymMat2d>& a, const GridField<SymMat2d>& b,
                       int margin) {
  const GridField<SymMat2d> da = restrict_interior(rec.a - a, margin);
  const GridField<SymMat2d> db = restrict_interior(rec.b - b, margin);
  return {norm_l2(da), norm_l2(db), norm_max(da), norm_max(db)};
}

}  // namespace

ImmersionResult reconstruct(const GridField<SymMat2d>& a, const GridField<SymMat2d>& b,
                            const ReconstructOptions& opts) {
  ImmersionResult out;
  out.bundle = build_coefficients(a, b, opts.coefficients);
  const CoefficientBundle& bundle = out.bundle;
  const GridSpec& s = bundle.spec();
  ReconstructDiagnostics& diag = out.diagnostics;
  diag.warnings = bundle.diag.warnings;

  const GridIndex base = opts.base.value_or(s.center());
  if (!s.contains(base)) throw ValidationError("reconstruct: base node outside the grid");

  const OmegaPair<3> omega = skew_pair_matrices(bundle.Omega);
  SolveOptions solve;
  solve.convention = Convention::right;
  solve.threads = opts.threads;
  out.frame = solve_frame<3>(omega, base, opts.base_rotation, solve);
  diag.frame = out.frame.diag;

  // f_i = P g_i; tangent independence is checked before integrating.
  const GridField<Vec3d> f1 =
      zip_fields(out.frame.P, bundle.G, [](const Mat3d& p, const Mat3d& g) -> Vec3d { return p * g.col(0); });
  const GridField<Vec3d> f2 =
      zip_fields(out.frame.P, bundle.G, [](const Mat3d& p, const Mat3d& g) -> Vec3d { return p * g.col(1); });
  diag.min_tangent_cross = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const Vec3d cross = f1(i, j).cross(f2(i, j));
      const double len = cross.norm();
      if (!(len >= opts.degeneracy_floor)) {
        std::ostringstream os;
        os << "reconstructed tangents are linearly dependent at node (" << i << ", " << j
           << "): |f1 x f2| = " << len << " < " << opts.degeneracy_floor;
        throw DegeneracyError(os.str(), i, j);
      }
      diag.min_tangent_cross = std::min(diag.min_tangent_cross, len);
      const Mat3d F = out.frame.P(i, j) * bundle.G(i, j);
      const Mat3d G = bundle.G(i, j);
      diag.factorization_defect = std::max(diag.factorization_defect, (F.transpose() * F - G * G).norm());
      diag.normal_defect = std::max(diag.normal_defect, (F.col(2) - cross / len).norm());
    }
  }

  if (opts.quadrature == Quadrature::lie) {
    out.theta = integrate_lie(out.frame, omega, bundle.G, base, opts.base_theta, opts.threads);
  } else {
    out.theta = integrate_potential(f1, f2, base, opts.base_theta, opts.threads).theta;
  }

  diag.compat = check_compatibility(bundle, opts.margin);
  diag.holonomy = plaquette_holonomy<3>(omega);
  const double h = s.h;
  if (diag.compat.omega_residual_l2 > opts.incompatibility_factor * h * h) {
    std::ostringstream os;
    os << "prescribed forms look incompatible: interior Omega residual " << diag.compat.omega_residual_l2
       << " exceeds " << opts.incompatibility_factor << " h^2 = " << opts.incompatibility_factor * h * h
       << "; the reconstruction depends on the integration path";
    diag.warnings.push_back(os.str());
  }

  try {
    const FundamentalForms rec = fundamental_forms(out.theta, opts.degeneracy_floor);
    diag.recovered_forms = form_errors(rec, a, b, opts.margin);
  } catch (const DegeneracyError& e) {
    diag.warnings.push_back(std::string("recovered forms unavailable: ") + e.what());
    diag.recovered_forms = {std::nan(""), std::nan(""), std::nan(""), std::nan("")};
  }
  return out;
}

FundamentalForms fundamental_forms(const GridField<Vec3d>& theta, double degeneracy_floor) {
  const GridSpec& s = theta.spec();
  const GridField<Vec3d> t1 = partial(theta, Axis::x);
  const GridField<Vec3d> t2 = partial(theta, Axis::y);
  const GridField<Vec3d> t11 = second_partial(theta, Axis::x);
  const GridField<Vec3d> t22 = second_partial(theta, Axis::y);
  const GridField<Vec3d> t12 = 0.5 * (partial(t1, Axis::y) + partial(t2, Axis::x));
  FundamentalForms out{GridField<SymMat2d>(s), GridField<SymMat2d>(s)};
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const Vec3d& u = t1(i, j);
      const Vec3d& v = t2(i, j);
      const Vec3d cross = u.cross(v);
      const double len = cross.norm();
      if (!(len >= degeneracy_floor)) {
        std::ostringstream os;
        os << "tangent vectors are linearly dependent at node (" << i << ", " << j << "): |d1 x d2| = " << len;
        throw DegeneracyError(os.str(), i, j);
      }
      const Vec3d n = cross / len;
      out.a(i, j) = {u.dot(u), u.dot(v), v.dot(v)};
      out.b(i, j) = {t11(i, j).dot(n), t12(i, j).dot(n), t22(i, j).dot(n)};
    }
  }
  return out;
}

Alignment align_rigid(const GridField<Vec3d>& theta, const GridField<Vec3d>& theta_ref) {
  require_same_grid(theta.spec(), theta_ref.spec(), "align_rigid");
  const std::size_t n = theta.size();
  Vec3d mean_x = Vec3d::Zero();
  Vec3d mean_y = Vec3d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    mean_x += theta.values()[k];
    mean_y += theta_ref.values()[k];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  Mat3d cov = Mat3d::Zero();
  for (std::size_t k = 0; k < n; ++k)
    cov += (theta_ref.values()[k] - mean_y) * (theta.values()[k] - mean_x).transpose();

  Eigen::JacobiSVD<Mat3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3d sv = svd.singularValues();
  if (!(sv(1) > 1e-12 * std::max(sv(0), 1e-300))) {
    std::ostringstream os;
    os << "align_rigid: point covariance has rank < 2 (singular values " << sv.transpose() << ")";
    throw DegeneracyError(os.str());
  }
  Mat3d d = Mat3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  Alignment out;
  out.motion.C = svd.matrixU() * d * svd.matrixV().transpose();
  out.motion.b = mean_y - out.motion.C * mean_x;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = (out.motion(theta.values()[k]) - theta_ref.values()[k]).norm();
    sum += e * e;
    out.max_error = std::max(out.max_error, e);
  }
  out.rms = std::sqrt(sum / static_cast<double>(n));
  return out;
}

GridField<Vec3d> apply(const RigidMotion& m, const GridField<Vec3d>& theta) {
  return map_field(theta, [&](const Vec3d& x) -> Vec3d { return m(x); });
}

void write_obj(const std::string& path, const GridField<Vec3d>& theta, const GridField<Mat3d>* frame) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  const GridSpec& s = theta.spec();
  char buf[128];
  for (const Vec3d& v : theta.values()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v(0), v(1), v(2));
    os << buf;
  }
  // Counter-clockwise in parameter space gives normals along d1 x d2. If a
  // frame is supplied, flip cells whose geometric normal disagrees with f3.
  auto id = [&](int i, int j) { return j * s.nx + i + 1; };
  for (int j = 0; j + 1 < s.ny; ++j) {
    for (int i = 0; i + 1 < s.nx; ++i) {
      bool flip = false;
      if (frame) {
        const Vec3d n = (theta(i + 1, j) - theta(i, j)).cross(theta(i, j + 1) - theta(i, j));
        flip = n.dot((*frame)(i, j).col(2)) < 0.0;
      }
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (!flip)
        os << "f " << a << ' ' << b << ' ' << c << "\nf " << a << ' ' << c << ' ' << d << '\n';
      else
        os << "f " << a << ' ' << c << ' ' << b << "\nf " << a << ' ' << d << ' ' << c << '\n';
    }
  }
  if (!os) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace surfrec
