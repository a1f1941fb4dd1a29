#pragma once

// The coefficient chain that turns prescribed first and second fundamental
// forms (a_ij, b_ij) into an so(3)-valued one-form Omega:
//
//   a^{ij}       adjugate inverse of a
//   b_i^j        = a^{jk} b_ik
//   Gamma^k_ij   = 1/2 a^{kl} (d_j a_il + d_i a_jl - d_l a_ij)
//   G            = blockdiag(a, 1)^{1/2}
//   Gamma_i      = [ Gamma^1_i1  Gamma^1_i2  -b_i^1 ]
//                  [ Gamma^2_i1  Gamma^2_i2  -b_i^2 ]
//                  [ b_i1        b_i2         0     ]
//   Omega_i      = (G Gamma_i - d_i G) G^{-1}
//
// Derivatives are only ever taken of a (and G); b enters algebraically.

#include <array>
#include <string>
#include <vector>

#include "surfrec/gridfield.hpp"
#include "surfrec/matstore.hpp"

namespace surfrec {

/// Christoffel symbols of the second kind, upper[k](i, j) = Gamma^k_ij with
/// zero-based indices. Symmetric in (i, j) by construction.
struct Christoffel {
  std::array<Mat2d, 2> upper{Mat2d::Zero(), Mat2d::Zero()};

  static Christoffel Zero() { return {}; }

  double operator()(int k, int i, int j) const { return upper[k](i, j); }

  Christoffel& operator+=(const Christoffel& o) {
    upper[0] += o.upper[0];
    upper[1] += o.upper[1];
    return *this;
  }
  Christoffel& operator-=(const Christoffel& o) {
    upper[0] -= o.upper[0];
    upper[1] -= o.upper[1];
    return *this;
  }
  Christoffel& operator*=(double c) {
    upper[0] *= c;
    upper[1] *= c;
    return *this;
  }
  friend Christoffel operator+(Christoffel a, const Christoffel& b) { return a += b; }
  friend Christoffel operator-(Christoffel a, const Christoffel& b) { return a -= b; }
  friend Christoffel operator*(double c, Christoffel a) { return a *= c; }
  friend Christoffel operator*(Christoffel a, double c) { return a *= c; }
};

inline double squared_norm(const Christoffel& c) {
  return c.upper[0].squaredNorm() + c.upper[1].squaredNorm();
}

struct CoefficientOptions {
  /// Uniform lower bound required of the eigenvalues of a.
  double lambda_min = 1e-6;
  /// Positive-definiteness gate on det a.
  double eps_det = 1e-12;
  /// Bound on the relative antisymmetry defect |Omega + Omega^T| / (1 + |Omega|).
  double tol_skew = 1e-8;
  /// Throw instead of warning when the antisymmetry defect exceeds tol_skew.
  bool strict_skew = false;
};

/// Checks positive definiteness and the eigenvalue floor at every node.
GridField<SpdMat2d> validate_metric(const GridField<SymMat2d>& a, const CoefficientOptions& opts);

GridField<Christoffel> christoffel(const GridField<SpdMat2d>& a, const CoefficientOptions& opts = {});

struct ExtendedMetric {
  GridField<Mat3d> G;
  GridField<Mat3d> G_inv;
};

/// G = blockdiag(sqrt(a), 1) and its inverse.
ExtendedMetric extend_metric(const GridField<SpdMat2d>& a);

/// b_i^j = a^{jk} b_ik, stored as m(i, j).
GridField<Mat2d> mixed_second_form(const GridField<SymMat2d>& b, const GridField<SpdMat2d>& a_inv);

std::array<GridField<Mat3d>, 2> connection_matrices(const GridField<Christoffel>& gamma,
                                                    const GridField<SymMat2d>& b,
                                                    const GridField<SpdMat2d>& a_inv);

struct GaugeResult {
  std::array<GridField<SkewMat3d>, 2> omega;
  /// Relative antisymmetry defect before projection onto so(3).
  std::array<GridField<double>, 2> skew_defect;
  std::array<double, 2> max_skew_defect{0.0, 0.0};
};

GaugeResult gauge_omega(const GridField<Mat3d>& G, const GridField<Mat3d>& G_inv,
                        const std::array<GridField<Mat3d>, 2>& gamma);

struct CoefficientDiagnostics {
  double min_eigenvalue = 0.0;
  std::array<double, 2> max_skew_defect{0.0, 0.0};
  bool skew_within_tol = true;
  std::vector<std::string> warnings;
};

struct CoefficientBundle {
  GridField<SpdMat2d> a;
  GridField<SymMat2d> b;
  GridField<SpdMat2d> a_inv;
  GridField<Mat2d> b_mixed;
  GridField<Christoffel> christoffel;
  GridField<Mat3d> G;
  GridField<Mat3d> G_inv;
  std::array<GridField<Mat3d>, 2> Gamma;
  std::array<GridField<SkewMat3d>, 2> Omega;
  std::array<GridField<double>, 2> skew_defect;
  CoefficientDiagnostics diag;

  const GridSpec& spec() const { return a.spec(); }
};

CoefficientBundle build_coefficients(const GridField<SymMat2d>& a, const GridField<SymMat2d>& b,
                                     const CoefficientOptions& opts = {});

/// Omega_i as plain 3x3 matrices, for the dimension-generic frame solver.
GridField<Mat3d> as_matrices(const GridField<SkewMat3d>& omega);

}  // namespace surfrec
