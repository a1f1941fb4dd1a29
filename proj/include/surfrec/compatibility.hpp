#pragma once

// Three residual forms of the integrability condition for prescribed (a, b):
//
//   Omega form   R_Omega = d1 Omega_2 - d2 Omega_1 - Omega_2 Omega_1 + Omega_1 Omega_2
//   Gamma form   R_Gamma = d1 Gamma_2 + Gamma_1 Gamma_2 - d2 Gamma_1 - Gamma_2 Gamma_1
//   Gauss        K(a) - det b / det a, with K from the Christoffel symbols:
//                  K det a = a_1l (d1 G^l_22 - d2 G^l_12 + G^m_22 G^l_1m - G^m_12 G^l_2m)
//   Codazzi      for j = 1, 2:
//                  d1 b_j2 - d2 b_j1 - sum_k (G^k_1j b_k2 - G^k_2j b_k1)
//
// For exact data R_Omega = G R_Gamma G^{-1}. Norms are taken on an interior
// subgrid so one-sided boundary stencils do not enter.

#include <array>
#include <string>
#include <vector>

#include "surfrec/coefficients.hpp"
#include "surfrec/corpus.hpp"
#include "surfrec/gridfield.hpp"

namespace surfrec {

GridField<Mat3d> omega_residual(const GridField<SkewMat3d>& omega1, const GridField<SkewMat3d>& omega2);

GridField<Mat3d> gamma_residual(const GridField<Mat3d>& gamma1, const GridField<Mat3d>& gamma2);

struct GcmResidual {
  GridField<double> gauss;
  std::array<GridField<double>, 2> codazzi;
};

GcmResidual gcm_residual(const CoefficientBundle& bundle);

struct CompatReport {
  int margin = 2;
  double omega_residual_l2 = 0.0;
  double gamma_residual_l2 = 0.0;
  double gauss_residual_l2 = 0.0;
  std::array<double, 2> codazzi_residual_l2{0.0, 0.0};
  double omega_residual_max = 0.0;
  double gauss_residual_max = 0.0;
  std::array<double, 2> codazzi_residual_max{0.0, 0.0};
  /// Per-node residuals on the interior subgrid.
  GridField<Mat3d> omega;
  GridField<Mat3d> gamma;
  GridField<double> gauss;
  std::array<GridField<double>, 2> codazzi;

  /// sqrt(gauss^2 + codazzi_1^2 + codazzi_2^2)
  double gcm_residual_l2() const;
};

CompatReport check_compatibility(const CoefficientBundle& bundle, int margin = 2);

struct EquivalenceRow {
  int n = 0;
  double h = 0.0;
  double omega_l2 = 0.0;
  double gamma_l2 = 0.0;
  double gcm_l2 = 0.0;
};

struct EquivalenceStudy {
  std::string case_name;
  bool compatible = true;
  std::vector<EquivalenceRow> rows;
  /// log2 ratios between consecutive rows, per column (empty for one row).
  std::vector<std::array<double, 3>> orders;
};

/// Residual norms of one prescribed-forms case over a list of resolutions
/// (n cells per side, h = 1/n).
EquivalenceStudy equivalence_study(const corpus::FormsCase& c, const std::vector<int>& ns, int margin = 2,
                                   const CoefficientOptions& opts = {});

}  // namespace surfrec
