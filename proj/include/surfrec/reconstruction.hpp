#pragma once

// End-to-end reconstruction: (a, b) -> Omega -> P -> theta with
// d_i theta = P g_i, g_i the i-th column of G. Also the inverse map
// theta -> (a, b), rigid alignment, and the refinement studies built on them.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "surfrec/coefficients.hpp"
#include "surfrec/compatibility.hpp"
#include "surfrec/corpus.hpp"
#include "surfrec/gridfield.hpp"
#include "surfrec/pfaffian.hpp"

namespace surfrec {

enum class Quadrature {
  /// Integrates P(t) g(t) exactly along each edge for the midpoint
  /// exponential frame and linear g; exact for constant coefficients.
  lie,
  /// Trapezoid rule on f_i = P g_i.
  trapezoid
};

struct ReconstructOptions {
  CoefficientOptions coefficients;
  int margin = 2;
  /// Abort when |f1 x f2| drops below this anywhere.
  double degeneracy_floor = 1e-8;
  int threads = 1;
  /// Defaults to the grid centre.
  std::optional<GridIndex> base;
  Mat3d base_rotation = Mat3d::Identity();
  Vec3d base_theta = Vec3d::Zero();
  Quadrature quadrature = Quadrature::lie;
  /// Incompatibility warning when the interior Omega residual exceeds
  /// incompatibility_factor * h^2.
  double incompatibility_factor = 10.0;
};

struct FormErrors {
  double a_l2 = 0.0;
  double b_l2 = 0.0;
  double a_max = 0.0;
  double b_max = 0.0;
};

struct ReconstructDiagnostics {
  CompatReport compat;
  HolonomyReport holonomy;
  FormErrors recovered_forms;
  /// Frame diagnostics of the Pfaffian solve.
  FrameDiagnostics frame;
  double min_tangent_cross = 0.0;
  /// max over nodes of |F^T F - G^2|_F and |f3 - f1 x f2 / |f1 x f2||
  double factorization_defect = 0.0;
  double normal_defect = 0.0;
  std::vector<std::string> warnings;
};

struct ImmersionResult {
  GridField<Vec3d> theta;
  FrameField3 frame;
  CoefficientBundle bundle;
  ReconstructDiagnostics diagnostics;
};

ImmersionResult reconstruct(const GridField<SymMat2d>& a, const GridField<SymMat2d>& b,
                            const ReconstructOptions& opts = {});

struct FundamentalForms {
  GridField<SymMat2d> a;
  GridField<SymMat2d> b;
};

/// a_ij = d_i theta . d_j theta, b_ij = d_ij theta . n with
/// n = d1 theta x d2 theta / |.|; b12 from the averaged mixed differences.
FundamentalForms fundamental_forms(const GridField<Vec3d>& theta, double degeneracy_floor = 1e-8);

struct RigidMotion {
  Mat3d C = Mat3d::Identity();
  Vec3d b = Vec3d::Zero();

  Vec3d operator()(const Vec3d& x) const { return C * x + b; }
};

struct Alignment {
  RigidMotion motion;
  double rms = 0.0;
  double max_error = 0.0;
};

/// Proper rigid motion minimising sum |C theta + b - theta_ref|^2 (Kabsch).
Alignment align_rigid(const GridField<Vec3d>& theta, const GridField<Vec3d>& theta_ref);

GridField<Vec3d> apply(const RigidMotion& m, const GridField<Vec3d>& theta);

/// Triangulated grid in Wavefront OBJ form, faces wound so that their
/// normals agree with f3.
void write_obj(const std::string& path, const GridField<Vec3d>& theta, const GridField<Mat3d>* frame = nullptr);

// ---------------------------------------------------------------------------
// Studies

struct RoundtripRow {
  int n = 0;
  double h = 0.0;
  double theta_max_error = 0.0;
  double theta_rms_error = 0.0;
  FormErrors forms;
  double max_skew_defect = 0.0;
  double omega_residual_l2 = 0.0;
  double holonomy_max = 0.0;
  std::size_t projection_count = 0;
  std::size_t node_count = 0;
  double max_orthogonality_defect = 0.0;
  double max_det_deviation = 0.0;
};

struct RoundtripStudy {
  std::string case_name;
  std::vector<RoundtripRow> rows;
  /// log2 error ratios between consecutive rows: theta max, a l2, b l2.
  std::vector<std::array<double, 3>> orders;
};

RoundtripStudy roundtrip_study(const corpus::CorpusCase& c, const std::vector<int>& ns,
                               const ReconstructOptions& opts = {});

/// A one-parameter family of prescribed forms together with its limit.
struct FormsFamily {
  std::string name;
  std::function<corpus::CorpusCase(double k)> member;
  corpus::CorpusCase limit;
};

/// "sphere-radius" (R = 1 + 1/k), "cylinder-curvature" (curvature 1 + 1/k),
/// "constant" (the unit sphere for every k).
FormsFamily forms_family(const std::string& name);
std::vector<std::string> family_names();

/// Ten fixed smooth test functions on the unit square (a squared bubble
/// times low-frequency cosines), evaluated in grid-relative coordinates.
double weak_test_function(int index, double s, double t);
constexpr int kWeakTestCount = 10;

struct CompactnessRow {
  double k = 0.0;
  double theta_l2 = 0.0;
  double theta_w12 = 0.0;
  double theta_w22 = 0.0;
  double frame_w12 = 0.0;
  std::array<double, kWeakTestCount> pairings{};
};

struct CompactnessReport {
  std::string family;
  int n = 0;
  std::vector<CompactnessRow> rows;
  /// theta_w22 ratios between consecutive k.
  std::vector<double> w22_ratios;
  bool strong_monotone = false;
  bool pairings_monotone = false;
};

CompactnessReport compactness_experiment(const FormsFamily& family, const std::vector<double>& ks, int n,
                                         const ReconstructOptions& opts = {});

}  // namespace surfrec
