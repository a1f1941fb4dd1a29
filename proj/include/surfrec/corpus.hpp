#pragma once

// Closed-form surfaces with exact immersion, fundamental forms and moving
// frame. Every case is checked against finite differences of its own
// immersion when constructed.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "surfrec/coefficients.hpp"
#include "surfrec/gridfield.hpp"
#include "surfrec/matstore.hpp"

namespace surfrec::corpus {

/// theta and its partial derivatives up to second order at one point.
struct SurfaceJet {
  Vec3d theta;
  Vec3d d1;
  Vec3d d2;
  Vec3d d11;
  Vec3d d12;
  Vec3d d22;
};

struct Rect {
  double x_min;
  double x_max;
  double y_min;
  double y_max;

  bool contains(double x, double y, double slack = 1e-12) const {
    return x >= x_min - slack && x <= x_max + slack && y >= y_min - slack && y <= y_max + slack;
  }
};

using CaseParams = std::map<std::string, double>;

struct SampledCase {
  GridField<Vec3d> theta;
  GridField<SymMat2d> a;
  GridField<SymMat2d> b;
};

class CorpusCase {
 public:
  using JetFn = std::function<SurfaceJet(double, double)>;

  CorpusCase(std::string name, CaseParams params, Rect admissible, Vec2d default_origin,
             double eigen_floor, JetFn jet);

  const std::string& name() const { return name_; }
  const CaseParams& params() const { return params_; }
  const Rect& admissible() const { return admissible_; }
  /// Documented lower bound of the eigenvalues of a over the admissible rectangle.
  double eigen_floor() const { return eigen_floor_; }
  /// The unit normal is always (d1 x d2) / |d1 x d2|.
  static constexpr const char* normal_orientation = "d1 x d2 / |d1 x d2|";

  /// Unit-square grid with n cells per side at the case's default origin.
  GridSpec grid(int n) const;

  SurfaceJet jet(double x, double y) const { return jet_(x, y); }
  Vec3d theta(double x, double y) const { return jet_(x, y).theta; }
  Vec3d normal(double x, double y) const;
  SymMat2d a(double x, double y) const;
  SymMat2d b(double x, double y) const;
  /// d_k a for k = 1, 2.
  std::array<SymMat2d, 2> da(double x, double y) const;
  Christoffel christoffel(double x, double y) const;
  Mat3d G(double x, double y) const;
  std::array<Mat3d, 2> dG(double x, double y) const;
  std::array<Mat3d, 2> Gamma(double x, double y) const;
  std::array<SkewMat3d, 2> omega(double x, double y) const;
  /// Rotation field P = F G^{-1} with F = [d1 d2 n].
  Mat3d frame(double x, double y) const;

  /// Exact nodewise sampling of (theta, a, b). Rejects grids that leave the
  /// admissible rectangle.
  SampledCase sample(const GridSpec& grid) const;
  GridField<Christoffel> sample_christoffel(const GridSpec& grid) const;
  std::array<GridField<SkewMat3d>, 2> sample_omega(const GridSpec& grid) const;
  GridField<Mat3d> sample_frame(const GridSpec& grid) const;

  void require_inside(const GridSpec& grid) const;

 private:
  std::string name_;
  CaseParams params_;
  Rect admissible_;
  Vec2d origin_;
  double eigen_floor_;
  JetFn jet_;
};

struct ConsistencyResult {
  double max_rel_error_a = 0.0;
  double max_rel_error_b = 0.0;
  bool passed = false;
};

/// Compares a and b against central differences (step fd_step) of theta and
/// of the tangent fields at random points of the admissible rectangle.
ConsistencyResult check_consistency(const CorpusCase& c, int points = 100, double fd_step = 1e-5,
                                    unsigned seed = 12345);

/// Names of the shipped surfaces: plane, cylinder, sphere, torus, helicoid, monge.
const std::vector<std::string>& case_names();

/// Builds a case, applying parameter overrides, and runs the registration
/// consistency check (throws ValidationError if it fails).
CorpusCase make_case(std::string_view name, const CaseParams& overrides = {});

/// Prescribed-forms data without necessarily having an immersion: every
/// corpus surface, plus the tagged negative case "incompatible" (a = I, b = I).
struct FormsCase {
  std::string name;
  bool compatible = true;
  std::function<GridSpec(int)> grid;
  std::function<SampledCase(const GridSpec&)> sample;
};

FormsCase forms_case(std::string_view name, const CaseParams& overrides = {});

}  // namespace surfrec::corpus
