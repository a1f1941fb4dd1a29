#pragma once

// Grid solver for the Pfaffian system dP = P Omega on SO(m), in either the
// right form (d_i P = P Omega_i) or the left form (d_i P + Omega_i P = 0).
//
// Each tree edge is advanced with the midpoint exponential
//   right:  P_next = P exp(s (Omega_start + Omega_end) / 2)
//   left:   P_next = exp(-s (Omega_start + Omega_end) / 2) P
// where s is the signed step. Transposing a right solution gives the left
// solution for the same Omega, node for node.

#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <atomic>
#include <cmath>
#include <vector>

#include "surfrec/gridfield.hpp"
#include "surfrec/matstore.hpp"
#include "surfrec/sweep.hpp"

namespace surfrec {

enum class Convention { right, left };

template <int Dim>
using SqMat = Eigen::Matrix<double, Dim, Dim>;

/// exp(W) for W in so(Dim). Closed forms for Dim = 2 and 3.
template <int Dim>
SqMat<Dim> exp_generator(const SqMat<Dim>& w) {
  if constexpr (Dim == 2) {
    const double t = 0.5 * (w(1, 0) - w(0, 1));
    const double c = std::cos(t);
    const double s = std::sin(t);
    SqMat<2> r;
    r << c, -s, s, c;
    return r;
  } else if constexpr (Dim == 3) {
    return exp_skew3(SkewMat3d::from_matrix(w)).matrix();
  } else {
    return w.exp();
  }
}

/// Polar factor of m, required to have positive determinant.
template <int Dim>
SqMat<Dim> project_rotation(const SqMat<Dim>& m) {
  if constexpr (Dim == 3) {
    return project_so3(Mat3d(m)).matrix();
  } else {
    const double det = m.determinant();
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "project_rotation: determinant " << det << " is not positive";
      throw DegeneracyError(os.str());
    }
    Eigen::JacobiSVD<SqMat<Dim>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
  }
}

/// One midpoint-exponential step along an edge with signed length `step`.
template <int Dim>
SqMat<Dim> step_edge(const SqMat<Dim>& p, const SqMat<Dim>& omega_start,
                     const SqMat<Dim>& omega_end, double step, Convention convention) {
  const SqMat<Dim> mean = 0.5 * step * (omega_start + omega_end);
  if (convention == Convention::right) return p * exp_generator<Dim>(mean);
  return exp_generator<Dim>(SqMat<Dim>(-mean)) * p;
}

/// Angle of a rotation (largest principal angle for Dim > 3).
template <int Dim>
double rotation_angle(const SqMat<Dim>& r) {
  if constexpr (Dim == 2) {
    return std::abs(std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1)));
  } else if constexpr (Dim == 3) {
    const SkewMat3d axis = SkewMat3d::from_matrix(r);  // sin(angle) * unit axis
    const double s = std::sqrt(axis.w1 * axis.w1 + axis.w2 * axis.w2 + axis.w3 * axis.w3);
    return std::atan2(s, 0.5 * (r.trace() - 1.0));
  } else {
    // |R - I|_2 = 2 sin(angle_max / 2)
    Eigen::JacobiSVD<SqMat<Dim>> svd(r - SqMat<Dim>::Identity());
    return 2.0 * std::asin(std::min(1.0, 0.5 * svd.singularValues()(0)));
  }
}

struct FrameDiagnostics {
  /// Largest orthogonality defect seen before any re-projection.
  double max_defect_before_projection = 0.0;
  std::size_t projection_count = 0;
  std::size_t node_count = 0;
  /// Final per-node maxima of |P^T P - I|_F and |det P - 1|.
  double max_orthogonality_defect = 0.0;
  double max_det_deviation = 0.0;
  /// |grad P|^2 / |Omega|^2 in discrete L2, grad P by finite differences.
  /// For an exact frame |d_i P| = |Omega_i| pointwise, so this tends to 1;
  /// NaN when Omega vanishes.
  double gradient_energy_ratio = 0.0;
};

template <int Dim>
struct FrameField {
  GridField<SqMat<Dim>> P;
  GridIndex base;
  SqMat<Dim> base_value = SqMat<Dim>::Identity();
  Convention convention = Convention::right;
  FrameDiagnostics diag;
};

using FrameField3 = FrameField<3>;

struct SolveOptions {
  Convention convention = Convention::right;
  /// Re-project a node onto SO(m) when its orthogonality defect exceeds this.
  double projection_threshold = 1e-12;
  int threads = 1;
};

template <int Dim>
using OmegaPair = std::array<GridField<SqMat<Dim>>, 2>;

/// Integrates the Pfaffian system along the canonical sweep tree.
template <int Dim>
FrameField<Dim> solve_frame(const OmegaPair<Dim>& omega, GridIndex base, const SqMat<Dim>& base_value,
                            const SolveOptions& opts = {}) {
  require_same_grid(omega[0].spec(), omega[1].spec(), "solve_frame");
  const GridSpec& s = omega[0].spec();
  if (!s.contains(base)) throw ValidationError("solve_frame: base node outside the grid");
  if (orthogonality_defect(base_value) > 1e-10 || std::abs(base_value.determinant() - 1.0) > 1e-10)
    throw ValidationError("solve_frame: base value is not a rotation");

  FrameField<Dim> out{GridField<SqMat<Dim>>(s), base, base_value, opts.convention, {}};
  out.P[base] = base_value;
  GridField<double> defect(s);
  GridField<unsigned char> projected(s, 0);

  sweep_tree(out.P, base, opts.threads, [&](const SqMat<Dim>& p, const SweepEdge& e) {
    const auto& w = omega[e.axis == Axis::x ? 0 : 1];
    SqMat<Dim> next = step_edge<Dim>(p, w[e.from], w[e.to], e.step, opts.convention);
    const double d = orthogonality_defect(next);
    defect[e.to] = d;
    if (d > opts.projection_threshold) {
      try {
        next = project_rotation<Dim>(next);
      } catch (const DegeneracyError& err) {
        throw DegeneracyError(std::string("frame degenerated during integration: ") + err.what(),
                              e.to.i, e.to.j);
      }
      projected[e.to] = 1;
    }
    return next;
  });

  FrameDiagnostics& diag = out.diag;
  diag.node_count = s.size();
  for (std::size_t k = 0; k < s.size(); ++k) {
    diag.max_defect_before_projection = std::max(diag.max_defect_before_projection, defect.values()[k]);
    diag.projection_count += projected.values()[k];
    const SqMat<Dim>& p = out.P.values()[k];
    diag.max_orthogonality_defect = std::max(diag.max_orthogonality_defect, orthogonality_defect(p));
    diag.max_det_deviation = std::max(diag.max_det_deviation, std::abs(p.determinant() - 1.0));
  }
  const double grad = detail::sum_squares(partial(out.P, Axis::x)) + detail::sum_squares(partial(out.P, Axis::y));
  const double conn = detail::sum_squares(omega[0]) + detail::sum_squares(omega[1]);
  diag.gradient_energy_ratio = conn > 0.0 ? grad / conn : std::nan("");
  return out;
}

inline OmegaPair<3> skew_pair_matrices(const std::array<GridField<SkewMat3d>, 2>& omega) {
  auto mat = [](const SkewMat3d& w) -> Mat3d { return w.matrix(); };
  return {map_field(omega[0], mat), map_field(omega[1], mat)};
}

inline FrameField3 solve_frame(const std::array<GridField<SkewMat3d>, 2>& omega, GridIndex base,
                               const Mat3d& base_value, const SolveOptions& opts = {}) {
  return solve_frame<3>(skew_pair_matrices(omega), base, base_value, opts);
}

struct HolonomyReport {
  /// Rotation angle of the loop product around each cell; cell (i, j) has
  /// lower-left node (i, j), so the field is (nx - 1) x (ny - 1).
  int cells_x = 0;
  int cells_y = 0;
  std::vector<double> angle;
  double max = 0.0;
  double l2 = 0.0;

  double operator()(int i, int j) const { return angle[static_cast<std::size_t>(j) * cells_x + i]; }
};

/// Loop product of four step_edge transports around every grid cell,
/// starting from the identity. Compatible Omega gives angles of order h^3;
/// a constant non-commuting pair gives about h^2 |[W1, W2]|.
template <int Dim>
HolonomyReport plaquette_holonomy(const OmegaPair<Dim>& omega, Convention convention = Convention::right) {
  require_same_grid(omega[0].spec(), omega[1].spec(), "plaquette_holonomy");
  const GridSpec& s = omega[0].spec();
  const double h = s.h;
  HolonomyReport rep;
  rep.cells_x = s.nx - 1;
  rep.cells_y = s.ny - 1;
  rep.angle.resize(static_cast<std::size_t>(rep.cells_x) * rep.cells_y);
  const SqMat<Dim> I = SqMat<Dim>::Identity();
  double sum = 0.0;
  for (int j = 0; j < rep.cells_y; ++j) {
    for (int i = 0; i < rep.cells_x; ++i) {
      // (i,j) -> (i+1,j) -> (i+1,j+1) -> (i,j+1) -> (i,j)
      SqMat<Dim> p = I;
      p = step_edge<Dim>(p, omega[0](i, j), omega[0](i + 1, j), h, convention);
      p = step_edge<Dim>(p, omega[1](i + 1, j), omega[1](i + 1, j + 1), h, convention);
      p = step_edge<Dim>(p, omega[0](i + 1, j + 1), omega[0](i, j + 1), -h, convention);
      p = step_edge<Dim>(p, omega[1](i, j + 1), omega[1](i, j), -h, convention);
      const double a = rotation_angle<Dim>(p);
      rep.angle[static_cast<std::size_t>(j) * rep.cells_x + i] = a;
      rep.max = std::max(rep.max, a);
      sum += a * a;
    }
  }
  rep.l2 = std::sqrt(h * h * sum);
  return rep;
}

inline HolonomyReport plaquette_holonomy(const std::array<GridField<SkewMat3d>, 2>& omega,
                                         Convention convention = Convention::right) {
  return plaquette_holonomy<3>(skew_pair_matrices(omega), convention);
}

template <int Dim>
struct Relation {
  SqMat<Dim> C;
  /// max over nodes of |C_node - C|_F
  double spread = 0.0;
};

/// Constant rotation relating two solutions of the same system:
/// right form P_a = C P_b, left form P_a = P_b C.
template <int Dim>
Relation<Dim> relate_solutions(const FrameField<Dim>& a, const FrameField<Dim>& b) {
  require_same_grid(a.P.spec(), b.P.spec(), "relate_solutions");
  if (a.convention != b.convention)
    throw ValidationError("relate_solutions: frames use different conventions");
  auto product = [&](std::size_t k) -> SqMat<Dim> {
    const SqMat<Dim>& pa = a.P.values()[k];
    const SqMat<Dim>& pb = b.P.values()[k];
    return a.convention == Convention::right ? SqMat<Dim>(pa * pb.transpose())
                                             : SqMat<Dim>(pb.transpose() * pa);
  };
  const std::size_t n = a.P.size();
  SqMat<Dim> mean = SqMat<Dim>::Zero();
  for (std::size_t k = 0; k < n; ++k) mean += product(k);
  mean /= static_cast<double>(n);
  Relation<Dim> rel{project_rotation<Dim>(mean), 0.0};
  for (std::size_t k = 0; k < n; ++k) rel.spread = std::max(rel.spread, (product(k) - rel.C).norm());
  return rel;
}

}  // namespace surfrec
