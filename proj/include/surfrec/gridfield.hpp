#pragma once

// Node-centred rectangular grids, second-order finite differences and the
// discrete L2 / W^{1,2} / W^{2,2} norms used as stand-ins for the local
// Sobolev spaces.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "surfrec/errors.hpp"
#include "surfrec/matstore.hpp"

namespace surfrec {

enum class Axis : int { x = 1, y = 2 };

inline Axis other(Axis a) { return a == Axis::x ? Axis::y : Axis::x; }

struct GridIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double h = 1.0;
  int nx = 3;
  int ny = 3;

  /// Square grid of side 1 with n cells per side (h = 1/n).
  static GridSpec unit(int n, double x0 = 0.0, double y0 = 0.0) {
    return {x0, y0, 1.0 / n, n + 1, n + 1};
  }

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(x0) || !std::isfinite(y0)) {
      std::ostringstream os;
      os << "grid spacing must be positive and finite (h = " << h << ")";
      throw ValidationError(os.str());
    }
    if (nx < 3 || ny < 3) {
      std::ostringstream os;
      os << "grid needs at least 3 nodes per direction (got " << nx << "x" << ny << ")";
      throw ValidationError(os.str());
    }
  }

  double x(int i) const { return x0 + h * i; }
  double y(int j) const { return y0 + h * j; }
  double x_max() const { return x(nx - 1); }
  double y_max() const { return y(ny - 1); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  int extent(Axis a) const { return a == Axis::x ? nx : ny; }
  GridIndex center() const { return {(nx - 1) / 2, (ny - 1) / 2}; }
  bool contains(GridIndex n) const { return n.i >= 0 && n.i < nx && n.j >= 0 && n.j < ny; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": fields live on different grids");
}

template <typename T>
T zero_value() {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else if constexpr (requires { T::Zero(); }) {
    return T::Zero();
  } else {
    return T{};
  }
}

inline double squared_norm(double v) { return v * v; }
template <typename Derived>
double squared_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.squaredNorm();
}
inline double squared_norm(const SymMat2d& m) {
  return m.s11 * m.s11 + 2.0 * m.s12 * m.s12 + m.s22 * m.s22;
}
inline double squared_norm(const SkewMat3d& w) {
  return 2.0 * (w.w1 * w.w1 + w.w2 * w.w2 + w.w3 * w.w3);
}

/// Values of type T sampled at the nodes of a GridSpec, stored with the
/// x index running fastest.
template <typename T>
class GridField {
 public:
  using value_type = T;

  GridField() = default;
  explicit GridField(const GridSpec& spec) : GridField(spec, zero_value<T>()) {}
  GridField(const GridSpec& spec, const T& fill) : spec_(spec) {
    spec_.validate();
    values_.assign(spec_.size(), fill);
  }

  template <typename Fn>
  static GridField sample(const GridSpec& spec, Fn&& fn) {
    GridField out(spec);
    for (int j = 0; j < spec.ny; ++j)
      for (int i = 0; i < spec.nx; ++i) out(i, j) = fn(spec.x(i), spec.y(j));
    return out;
  }

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T& operator()(int i, int j) { return values_[index(i, j)]; }
  const T& operator()(int i, int j) const { return values_[index(i, j)]; }
  T& operator[](GridIndex n) { return (*this)(n.i, n.j); }
  const T& operator[](GridIndex n) const { return (*this)(n.i, n.j); }

  /// Element along a grid line: position k on the line `line` of axis a.
  T& along(Axis a, int k, int line) { return a == Axis::x ? (*this)(k, line) : (*this)(line, k); }
  const T& along(Axis a, int k, int line) const {
    return a == Axis::x ? (*this)(k, line) : (*this)(line, k);
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(spec_.nx) +
           static_cast<std::size_t>(i);
  }

  GridSpec spec_;
  std::vector<T> values_;
};

template <typename T, typename Fn>
auto map_field(const GridField<T>& f, Fn&& fn) {
  using R = std::decay_t<decltype(fn(std::declval<const T&>()))>;
  GridField<R> out(f.spec());
  auto src = f.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = fn(src[k]);
  return out;
}

template <typename T, typename U, typename Fn>
auto zip_fields(const GridField<T>& f, const GridField<U>& g, Fn&& fn) {
  require_same_grid(f.spec(), g.spec(), "zip_fields");
  using R = std::decay_t<decltype(fn(std::declval<const T&>(), std::declval<const U&>()))>;
  GridField<R> out(f.spec());
  auto a = f.values();
  auto b = g.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < a.size(); ++k) dst[k] = fn(a[k], b[k]);
  return out;
}

template <typename T>
GridField<T> operator+(const GridField<T>& f, const GridField<T>& g) {
  return zip_fields(f, g, [](const T& a, const T& b) -> T { return a + b; });
}
template <typename T>
GridField<T> operator-(const GridField<T>& f, const GridField<T>& g) {
  return zip_fields(f, g, [](const T& a, const T& b) -> T { return a - b; });
}
template <typename T>
GridField<T> operator*(double c, const GridField<T>& f) {
  return map_field(f, [c](const T& a) -> T { return c * a; });
}

/// Second-order finite difference along `dir`: central at interior nodes,
/// three-point one-sided at the two boundary nodes. Exact for fields that
/// are quadratic along the line.
template <typename T>
GridField<T> partial(const GridField<T>& f, Axis dir) {
  const GridSpec& s = f.spec();
  const int n = s.extent(dir);
  const int lines = s.extent(other(dir));
  const double c = 0.5 / s.h;
  GridField<T> out(s);
  for (int m = 0; m < lines; ++m) {
    for (int k = 1; k + 1 < n; ++k)
      out.along(dir, k, m) = T((f.along(dir, k + 1, m) - f.along(dir, k - 1, m)) * c);
    out.along(dir, 0, m) =
        T((4.0 * f.along(dir, 1, m) - 3.0 * f.along(dir, 0, m) - f.along(dir, 2, m)) * c);
    out.along(dir, n - 1, m) = T((3.0 * f.along(dir, n - 1, m) - 4.0 * f.along(dir, n - 2, m) +
                                  f.along(dir, n - 3, m)) *
                                 c);
  }
  return out;
}

/// Compact three-point second difference along `dir`; second-order
/// one-sided four-point stencil at the boundary when the line has >= 4 nodes.
template <typename T>
GridField<T> second_partial(const GridField<T>& f, Axis dir) {
  const GridSpec& s = f.spec();
  const int n = s.extent(dir);
  const int lines = s.extent(other(dir));
  const double c = 1.0 / (s.h * s.h);
  GridField<T> out(s);
  for (int m = 0; m < lines; ++m) {
    for (int k = 1; k + 1 < n; ++k)
      out.along(dir, k, m) = T(
          (f.along(dir, k + 1, m) + f.along(dir, k - 1, m) - 2.0 * f.along(dir, k, m)) * c);
    if (n >= 4) {
      out.along(dir, 0, m) = T((2.0 * f.along(dir, 0, m) + 4.0 * f.along(dir, 2, m) -
                                5.0 * f.along(dir, 1, m) - f.along(dir, 3, m)) *
                               c);
      out.along(dir, n - 1, m) = T((2.0 * f.along(dir, n - 1, m) + 4.0 * f.along(dir, n - 3, m) -
                                    5.0 * f.along(dir, n - 2, m) - f.along(dir, n - 4, m)) *
                                   c);
    } else {
      out.along(dir, 0, m) = out.along(dir, 1, m);
      out.along(dir, n - 1, m) = out.along(dir, 1, m);
    }
  }
  return out;
}

/// Subgrid with `margin` node layers removed on every side.
template <typename T>
GridField<T> restrict_interior(const GridField<T>& f, int margin) {
  const GridSpec& s = f.spec();
  if (margin < 0 || 2 * margin >= std::min(s.nx, s.ny) - 2) {
    std::ostringstream os;
    os << "interior margin " << margin << " leaves no usable subgrid of " << s.nx << "x" << s.ny;
    throw ValidationError(os.str());
  }
  if (margin == 0) return f;
  GridSpec sub{s.x(margin), s.y(margin), s.h, s.nx - 2 * margin, s.ny - 2 * margin};
  GridField<T> out(sub);
  for (int j = 0; j < sub.ny; ++j)
    for (int i = 0; i < sub.nx; ++i) out(i, j) = f(i + margin, j + margin);
  return out;
}

namespace detail {
template <typename T>
double sum_squares(const GridField<T>& f) {
  double acc = 0.0;
  for (const T& v : f.values()) acc += squared_norm(v);
  return acc;
}
}  // namespace detail

/// sqrt(h^2 * sum |f|^2)
template <typename T>
double norm_l2(const GridField<T>& f) {
  const double h = f.spec().h;
  return std::sqrt(h * h * detail::sum_squares(f));
}

template <typename T>
double norm_w12(const GridField<T>& f) {
  const double h = f.spec().h;
  const double acc = detail::sum_squares(f) + detail::sum_squares(partial(f, Axis::x)) +
                     detail::sum_squares(partial(f, Axis::y));
  return std::sqrt(h * h * acc);
}

template <typename T>
double norm_w22(const GridField<T>& f) {
  const double h = f.spec().h;
  const GridField<T> fx = partial(f, Axis::x);
  const double acc = detail::sum_squares(f) + detail::sum_squares(fx) +
                     detail::sum_squares(partial(f, Axis::y)) +
                     detail::sum_squares(second_partial(f, Axis::x)) +
                     2.0 * detail::sum_squares(partial(fx, Axis::y)) +
                     detail::sum_squares(second_partial(f, Axis::y));
  return std::sqrt(h * h * acc);
}

/// max over nodes of |f|
template <typename T>
double norm_max(const GridField<T>& f) {
  double m = 0.0;
  for (const T& v : f.values()) m = std::max(m, squared_norm(v));
  return std::sqrt(m);
}

}  // namespace surfrec
