#pragma once

// Grid field files.
//
// CSV: header "i,j,x,y,<components>", one row per node, j outer and i inner,
// values printed with 17 significant digits so they read back bit-exact.
//
// Binary: <stem>.json describes the grid and the column order, <stem>.bin
// holds nx*ny*ncomp little-endian float64 values, node-major with i
// running fastest and the components of one node contiguous.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "surfrec/coefficients.hpp"
#include "surfrec/gridfield.hpp"
#include "surfrec/matstore.hpp"

namespace surfrec {

/// A field with its values flattened to doubles.
struct RawGrid {
  GridSpec spec;
  std::string type;
  std::vector<std::string> components;
  std::vector<double> data;
};

template <typename T>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr std::string_view tag = "real";
  static std::vector<std::string> components() { return {"v"}; }
  static void put(const double& v, double* out) { out[0] = v; }
  static double get(const double* in) { return in[0]; }
};

template <>
struct FieldTraits<Vec3d> {
  static constexpr std::string_view tag = "vec3";
  static std::vector<std::string> components() { return {"x", "y", "z"}; }
  static void put(const Vec3d& v, double* out) {
    for (int k = 0; k < 3; ++k) out[k] = v(k);
  }
  static Vec3d get(const double* in) { return {in[0], in[1], in[2]}; }
};

template <>
struct FieldTraits<SymMat2d> {
  static constexpr std::string_view tag = "sym2";
  static std::vector<std::string> components() { return {"s11", "s12", "s22"}; }
  static void put(const SymMat2d& v, double* out) {
    out[0] = v.s11;
    out[1] = v.s12;
    out[2] = v.s22;
  }
  static SymMat2d get(const double* in) { return {in[0], in[1], in[2]}; }
};

template <>
struct FieldTraits<SkewMat3d> {
  static constexpr std::string_view tag = "skew3";
  static std::vector<std::string> components() { return {"w1", "w2", "w3"}; }
  static void put(const SkewMat3d& v, double* out) {
    out[0] = v.w1;
    out[1] = v.w2;
    out[2] = v.w3;
  }
  static SkewMat3d get(const double* in) { return {in[0], in[1], in[2]}; }
};

template <>
struct FieldTraits<Mat3d> {
  static constexpr std::string_view tag = "mat3";
  static std::vector<std::string> components() {
    return {"m11", "m12", "m13", "m21", "m22", "m23", "m31", "m32", "m33"};
  }
  static void put(const Mat3d& v, double* out) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out[3 * r + c] = v(r, c);
  }
  static Mat3d get(const double* in) {
    Mat3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = in[3 * r + c];
    return m;
  }
};

template <>
struct FieldTraits<Christoffel> {
  static constexpr std::string_view tag = "christoffel";
  static std::vector<std::string> components() { return {"g1_11", "g1_12", "g1_22", "g2_11", "g2_12", "g2_22"}; }
  static void put(const Christoffel& v, double* out) {
    for (int k = 0; k < 2; ++k) {
      out[3 * k] = v.upper[k](0, 0);
      out[3 * k + 1] = v.upper[k](0, 1);
      out[3 * k + 2] = v.upper[k](1, 1);
    }
  }
  static Christoffel get(const double* in) {
    Christoffel c;
    for (int k = 0; k < 2; ++k) c.upper[k] << in[3 * k], in[3 * k + 1], in[3 * k + 1], in[3 * k + 2];
    return c;
  }
};

template <typename T>
RawGrid to_raw(const GridField<T>& f) {
  using Tr = FieldTraits<T>;
  RawGrid raw{f.spec(), std::string(Tr::tag), Tr::components(), {}};
  const std::size_t nc = raw.components.size();
  raw.data.resize(f.size() * nc);
  for (std::size_t k = 0; k < f.size(); ++k) Tr::put(f.values()[k], raw.data.data() + k * nc);
  return raw;
}

template <typename T>
GridField<T> from_raw(const RawGrid& raw) {
  using Tr = FieldTraits<T>;
  if (raw.type != Tr::tag)
    throw FormatError("grid file holds '" + raw.type + "' values, expected '" + std::string(Tr::tag) + "'");
  const std::size_t nc = Tr::components().size();
  if (raw.components != Tr::components() || raw.data.size() != raw.spec.size() * nc)
    throw FormatError("grid file column layout does not match type '" + raw.type + "'");
  GridField<T> f(raw.spec);
  for (std::size_t k = 0; k < f.size(); ++k) f.values()[k] = Tr::get(raw.data.data() + k * nc);
  return f;
}

void write_csv_raw(const std::string& path, const RawGrid& raw);
RawGrid read_csv_raw(const std::string& path);

/// `stem` may be given with or without the .json extension.
void write_binary_raw(const std::string& stem, const RawGrid& raw);
RawGrid read_binary_raw(const std::string& stem);

/// Dispatches on the extension: ".csv" is CSV, anything else the JSON+binary pair.
void write_grid_raw(const std::string& path, const RawGrid& raw);
RawGrid read_grid_raw(const std::string& path);

template <typename T>
void write_grid(const std::string& path, const GridField<T>& f) {
  write_grid_raw(path, to_raw(f));
}

template <typename T>
GridField<T> read_grid(const std::string& path) {
  return from_raw<T>(read_grid_raw(path));
}

}  // namespace surfrec
