#pragma once

// Closed-form algebra for the 2x2 and 3x3 objects of the reconstruction
// pipeline. Everything here is a pure value-to-value function templated on
// the scalar type.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "surfrec/errors.hpp"

namespace surfrec {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using Mat2d = Mat2<double>;
using Mat3d = Mat3<double>;

/// Symmetric 2x2 matrix stored by its three independent entries.
template <typename Scalar>
struct SymMat2 {
  Scalar s11{0};
  Scalar s12{0};
  Scalar s22{0};

  static SymMat2 identity() { return {Scalar(1), Scalar(0), Scalar(1)}; }
  static SymMat2 diagonal(Scalar d1, Scalar d2) { return {d1, Scalar(0), d2}; }

  /// Symmetric part of an arbitrary 2x2 matrix.
  static SymMat2 from_matrix(const Mat2<Scalar>& m) {
    return {m(0, 0), Scalar(0.5) * (m(0, 1) + m(1, 0)), m(1, 1)};
  }

  Mat2<Scalar> matrix() const {
    Mat2<Scalar> m;
    m << s11, s12, s12, s22;
    return m;
  }

  /// Zero-based element access.
  Scalar operator()(int i, int j) const {
    if (i == 0 && j == 0) return s11;
    if (i == 1 && j == 1) return s22;
    return s12;
  }

  Scalar trace() const { return s11 + s22; }
  Scalar det() const { return s11 * s22 - s12 * s12; }
  bool is_finite() const {
    return std::isfinite(s11) && std::isfinite(s12) && std::isfinite(s22);
  }

  SymMat2& operator+=(const SymMat2& o) {
    s11 += o.s11;
    s12 += o.s12;
    s22 += o.s22;
    return *this;
  }
  SymMat2& operator-=(const SymMat2& o) {
    s11 -= o.s11;
    s12 -= o.s12;
    s22 -= o.s22;
    return *this;
  }
  SymMat2& operator*=(Scalar c) {
    s11 *= c;
    s12 *= c;
    s22 *= c;
    return *this;
  }
  friend SymMat2 operator+(SymMat2 a, const SymMat2& b) { return a += b; }
  friend SymMat2 operator-(SymMat2 a, const SymMat2& b) { return a -= b; }
  friend SymMat2 operator*(Scalar c, SymMat2 a) { return a *= c; }
  friend SymMat2 operator*(SymMat2 a, Scalar c) { return a *= c; }
  friend bool operator==(const SymMat2&, const SymMat2&) = default;
};

/// Symmetric positive definite 2x2 matrix. Only constructible through
/// validation, so holding one means det > eps and trace > 0 were checked.
template <typename Scalar>
class SpdMat2 {
 public:
  SpdMat2() : m_(SymMat2<Scalar>::identity()) {}

  /// Positive-definiteness gate: det > eps_det and trace > 0, plus an
  /// optional floor on the smaller eigenvalue.
  static SpdMat2 validated(const SymMat2<Scalar>& m, Scalar eps_det = Scalar(1e-12),
                           Scalar lambda_floor = Scalar(0));

  /// Skips validation; for values produced by closed forms that preserve
  /// positive definiteness.
  static SpdMat2 trusted(const SymMat2<Scalar>& m) {
    SpdMat2 r;
    r.m_ = m;
    return r;
  }

  const SymMat2<Scalar>& sym() const { return m_; }
  operator const SymMat2<Scalar>&() const { return m_; }
  Mat2<Scalar> matrix() const { return m_.matrix(); }
  Scalar operator()(int i, int j) const { return m_(i, j); }
  Scalar trace() const { return m_.trace(); }
  Scalar det() const { return m_.det(); }

 private:
  SymMat2<Scalar> m_;
};

/// Antisymmetric 3x3 matrix stored by its axial vector (w1, w2, w3):
///   [  0  -w3   w2 ]
///   [  w3   0  -w1 ]
///   [ -w2  w1    0 ]
template <typename Scalar>
struct SkewMat3 {
  Scalar w1{0};
  Scalar w2{0};
  Scalar w3{0};

  static SkewMat3 from_vector(const Vec3<Scalar>& v) { return {v(0), v(1), v(2)}; }

  /// Antisymmetric part of an arbitrary 3x3 matrix.
  static SkewMat3 from_matrix(const Mat3<Scalar>& m) {
    return {Scalar(0.5) * (m(2, 1) - m(1, 2)), Scalar(0.5) * (m(0, 2) - m(2, 0)),
            Scalar(0.5) * (m(1, 0) - m(0, 1))};
  }

  Vec3<Scalar> vector() const { return {w1, w2, w3}; }

  Mat3<Scalar> matrix() const {
    Mat3<Scalar> m;
    m << Scalar(0), -w3, w2, w3, Scalar(0), -w1, -w2, w1, Scalar(0);
    return m;
  }

  /// Rotation angle of exp(W), equal to the spectral norm of W.
  Scalar angle() const { return std::sqrt(w1 * w1 + w2 * w2 + w3 * w3); }

  SkewMat3& operator+=(const SkewMat3& o) {
    w1 += o.w1;
    w2 += o.w2;
    w3 += o.w3;
    return *this;
  }
  SkewMat3& operator-=(const SkewMat3& o) {
    w1 -= o.w1;
    w2 -= o.w2;
    w3 -= o.w3;
    return *this;
  }
  SkewMat3& operator*=(Scalar c) {
    w1 *= c;
    w2 *= c;
    w3 *= c;
    return *this;
  }
  friend SkewMat3 operator+(SkewMat3 a, const SkewMat3& b) { return a += b; }
  friend SkewMat3 operator-(SkewMat3 a, const SkewMat3& b) { return a -= b; }
  friend SkewMat3 operator*(Scalar c, SkewMat3 a) { return a *= c; }
  friend SkewMat3 operator*(SkewMat3 a, Scalar c) { return a *= c; }
  friend bool operator==(const SkewMat3&, const SkewMat3&) = default;
};

/// Proper rotation. Construction checks ||M^T M - I||_F and det M.
template <typename Scalar>
class RotMat3 {
 public:
  RotMat3() : m_(Mat3<Scalar>::Identity()) {}

  static RotMat3 identity() { return RotMat3(); }

  static RotMat3 checked(const Mat3<Scalar>& m, Scalar tol = Scalar(1e-10)) {
    const Scalar defect = (m.transpose() * m - Mat3<Scalar>::Identity()).norm();
    const Scalar det = m.determinant();
    if (!(defect <= tol) || !(std::abs(det - Scalar(1)) <= tol)) {
      std::ostringstream os;
      os << "matrix is not a proper rotation (orthogonality defect " << defect
         << ", det " << det << ")";
      throw ValidationError(os.str());
    }
    RotMat3 r;
    r.m_ = m;
    return r;
  }

  static RotMat3 trusted(const Mat3<Scalar>& m) {
    RotMat3 r;
    r.m_ = m;
    return r;
  }

  const Mat3<Scalar>& matrix() const { return m_; }
  operator const Mat3<Scalar>&() const { return m_; }
  RotMat3 transpose() const { return trusted(m_.transpose()); }
  friend RotMat3 operator*(const RotMat3& a, const RotMat3& b) { return trusted(a.m_ * b.m_); }

 private:
  Mat3<Scalar> m_;
};

using SymMat2d = SymMat2<double>;
using SpdMat2d = SpdMat2<double>;
using SkewMat3d = SkewMat3<double>;
using RotMat3d = RotMat3<double>;

/// Smaller eigenvalue of a symmetric 2x2 matrix, (tr - sqrt(tr^2 - 4 det)) / 2.
template <typename Scalar>
Scalar min_eig_sym2(const SymMat2<Scalar>& a) {
  using std::sqrt;
  const Scalar diff = a.s11 - a.s22;
  // tr^2 - 4 det written as a sum of squares; no cancellation.
  const Scalar disc = sqrt(diff * diff + Scalar(4) * a.s12 * a.s12);
  const Scalar tr = a.trace();
  if (tr > Scalar(0)) return Scalar(2) * a.det() / (tr + disc);
  return Scalar(0.5) * (tr - disc);
}

template <typename Scalar>
SpdMat2<Scalar> SpdMat2<Scalar>::validated(const SymMat2<Scalar>& m, Scalar eps_det,
                                           Scalar lambda_floor) {
  if (!m.is_finite()) throw HypothesisError("symmetric matrix has non-finite entries");
  if (!(m.det() > eps_det) || !(m.trace() > Scalar(0))) {
    std::ostringstream os;
    os << "matrix is not positive definite (det " << m.det() << ", trace " << m.trace() << ")";
    throw HypothesisError(os.str());
  }
  if (lambda_floor > Scalar(0)) {
    const Scalar lam = min_eig_sym2(m);
    if (lam < lambda_floor) {
      std::ostringstream os;
      os << "smallest eigenvalue " << lam << " below floor " << lambda_floor;
      throw HypothesisError(os.str());
    }
  }
  return trusted(m);
}

/// Principal square root of an SPD 2x2 matrix via
///   A^{1/2} = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)).
template <typename Scalar>
SpdMat2<Scalar> sqrt_spd2(const SpdMat2<Scalar>& a) {
  using std::sqrt;
  const SymMat2<Scalar>& m = a.sym();
  if (!(m.det() > Scalar(0)) || !(m.trace() > Scalar(0)))
    throw HypothesisError("sqrt_spd2: argument is not positive definite");
  const Scalar s = sqrt(m.det());
  const Scalar inv_t = Scalar(1) / sqrt(m.trace() + Scalar(2) * s);
  return SpdMat2<Scalar>::trusted({(m.s11 + s) * inv_t, m.s12 * inv_t, (m.s22 + s) * inv_t});
}

/// Adjugate inverse. Rejects det <= eps_det.
template <typename Scalar>
SpdMat2<Scalar> invert_spd2(const SpdMat2<Scalar>& a, Scalar eps_det = Scalar(1e-12)) {
  const SymMat2<Scalar>& m = a.sym();
  const Scalar det = m.det();
  if (!(det > eps_det)) {
    std::ostringstream os;
    os << "invert_spd2: determinant " << det << " not above " << eps_det;
    throw HypothesisError(os.str());
  }
  const Scalar inv = Scalar(1) / det;
  return SpdMat2<Scalar>::trusted({m.s22 * inv, -m.s12 * inv, m.s11 * inv});
}

/// Rodrigues formula exp(W) = I + A W + B W^2 with A = sin t / t,
/// B = (1 - cos t) / t^2. Taylor coefficients below t = 1e-4.
template <typename Scalar>
RotMat3<Scalar> exp_skew3(const SkewMat3<Scalar>& w) {
  using std::cos;
  using std::sin;
  if (!std::isfinite(w.w1) || !std::isfinite(w.w2) || !std::isfinite(w.w3))
    throw ValidationError("exp_skew3: non-finite generator");
  const Scalar t2 = w.w1 * w.w1 + w.w2 * w.w2 + w.w3 * w.w3;
  const Scalar t = std::sqrt(t2);
  Scalar a;
  Scalar b;
  if (t < Scalar(1e-4)) {
    a = Scalar(1) - t2 / Scalar(6) + t2 * t2 / Scalar(120);
    b = Scalar(0.5) - t2 / Scalar(24) + t2 * t2 / Scalar(720);
  } else {
    a = sin(t) / t;
    b = (Scalar(1) - cos(t)) / t2;
  }
  const Mat3<Scalar> k = w.matrix();
  return RotMat3<Scalar>::trusted(Mat3<Scalar>::Identity() + a * k + b * (k * k));
}

/// Closest rotation in Frobenius norm (polar factor). Requires det M > 0;
/// a non-positive determinant means the frame has degenerated.
template <typename Scalar>
RotMat3<Scalar> project_so3(const Mat3<Scalar>& m) {
  const Scalar det = m.determinant();
  if (!(det > Scalar(0))) {
    std::ostringstream os;
    os << "project_so3: determinant " << det << " is not positive";
    throw DegeneracyError(os.str());
  }
  Eigen::JacobiSVD<Mat3<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return RotMat3<Scalar>::trusted(svd.matrixU() * svd.matrixV().transpose());
}

/// ||M^T M - I||_F
template <typename Derived>
typename Derived::Scalar orthogonality_defect(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  return (m.transpose() * m - Plain::Identity(m.rows(), m.cols())).norm();
}

}  // namespace surfrec
