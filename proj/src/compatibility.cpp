#include "surfrec/compatibility.hpp"

#include <cmath>

namespace surfrec {

GridField<Mat3d> omega_residual(const GridField<SkewMat3d>& omega1, const GridField<SkewMat3d>& omega2) {
  require_same_grid(omega1.spec(), omega2.spec(), "omega_residual");
  const GridField<SkewMat3d> d1w2 = partial(omega2, Axis::x);
  const GridField<SkewMat3d> d2w1 = partial(omega1, Axis::y);
  GridField<Mat3d> out(omega1.spec());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Mat3d w1 = omega1.values()[k].matrix();
    const Mat3d w2 = omega2.values()[k].matrix();
    out.values()[k] = (d1w2.values()[k] - d2w1.values()[k]).matrix() - w2 * w1 + w1 * w2;
  }
  return out;
}

GridField<Mat3d> gamma_residual(const GridField<Mat3d>& gamma1, const GridField<Mat3d>& gamma2) {
  require_same_grid(gamma1.spec(), gamma2.spec(), "gamma_residual");
  const GridField<Mat3d> d1g2 = partial(gamma2, Axis::x);
  const GridField<Mat3d> d2g1 = partial(gamma1, Axis::y);
  GridField<Mat3d> out(gamma1.spec());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Mat3d& g1 = gamma1.values()[k];
    const Mat3d& g2 = gamma2.values()[k];
    out.values()[k] = d1g2.values()[k] + g1 * g2 - d2g1.values()[k] - g2 * g1;
  }
  return out;
}

GcmResidual gcm_residual(const CoefficientBundle& bundle) {
  const GridSpec& s = bundle.spec();
  const GridField<Christoffel>& c = bundle.christoffel;
  const GridField<Christoffel> d1c = partial(c, Axis::x);
  const GridField<Christoffel> d2c = partial(c, Axis::y);
  const GridField<SymMat2d> d1b = partial(bundle.b, Axis::x);
  const GridField<SymMat2d> d2b = partial(bundle.b, Axis::y);

  GcmResidual out{GridField<double>(s), {GridField<double>(s), GridField<double>(s)}};
  for (std::size_t n = 0; n < s.size(); ++n) {
    const Christoffel& g = c.values()[n];
    const SymMat2d& a = bundle.a.values()[n].sym();
    const SymMat2d& b = bundle.b.values()[n];

    // Zero-based: G^l_22 -> g(l, 1, 1), G^l_12 -> g(l, 0, 1).
    double k_det = 0.0;
    for (int l = 0; l < 2; ++l) {
      double r = d1c.values()[n](l, 1, 1) - d2c.values()[n](l, 0, 1);
      for (int m = 0; m < 2; ++m) r += g(m, 1, 1) * g(l, 0, m) - g(m, 0, 1) * g(l, 1, m);
      k_det += a(0, l) * r;
    }
    out.gauss.values()[n] = (k_det - b.det()) / a.det();

    for (int j = 0; j < 2; ++j) {
      double coupling = 0.0;
      for (int k = 0; k < 2; ++k) coupling += g(k, 0, j) * b(k, 1) - g(k, 1, j) * b(k, 0);
      out.codazzi[j].values()[n] = d1b.values()[n](j, 1) - d2b.values()[n](j, 0) - coupling;
    }
  }
  return out;
}

double CompatReport::gcm_residual_l2() const {
  return std::sqrt(gauss_residual_l2 * gauss_residual_l2 + codazzi_residual_l2[0] * codazzi_residual_l2[0] +
                   codazzi_residual_l2[1] * codazzi_residual_l2[1]);
}

CompatReport check_compatibility(const CoefficientBundle& bundle, int margin) {
  CompatReport rep;
  rep.margin = margin;
  rep.omega = restrict_interior(omega_residual(bundle.Omega[0], bundle.Omega[1]), margin);
  rep.gamma = restrict_interior(gamma_residual(bundle.Gamma[0], bundle.Gamma[1]), margin);
  const GcmResidual gcm = gcm_residual(bundle);
  rep.gauss = restrict_interior(gcm.gauss, margin);
  rep.codazzi = {restrict_interior(gcm.codazzi[0], margin), restrict_interior(gcm.codazzi[1], margin)};

  rep.omega_residual_l2 = norm_l2(rep.omega);
  rep.gamma_residual_l2 = norm_l2(rep.gamma);
  rep.gauss_residual_l2 = norm_l2(rep.gauss);
  rep.omega_residual_max = norm_max(rep.omega);
  rep.gauss_residual_max = norm_max(rep.gauss);
  for (int j = 0; j < 2; ++j) {
    rep.codazzi_residual_l2[j] = norm_l2(rep.codazzi[j]);
    rep.codazzi_residual_max[j] = norm_max(rep.codazzi[j]);
  }
  return rep;
}

EquivalenceStudy equivalence_study(const corpus::FormsCase& c, const std::vector<int>& ns, int margin,
                                   const CoefficientOptions& opts) {
  EquivalenceStudy study{c.name, c.compatible, {}, {}};
  for (int n : ns) {
    const GridSpec grid = c.grid(n);
    const corpus::SampledCase data = c.sample(grid);
    const CoefficientBundle bundle = build_coefficients(data.a, data.b, opts);
    const CompatReport rep = check_compatibility(bundle, margin);
    study.rows.push_back({n, grid.h, rep.omega_residual_l2, rep.gamma_residual_l2, rep.gcm_residual_l2()});
  }
  for (std::size_t r = 1; r < study.rows.size(); ++r) {
    const EquivalenceRow& p = study.rows[r - 1];
    const EquivalenceRow& q = study.rows[r];
    const double steps = std::log2(p.h / q.h);
    study.orders.push_back({std::log2(p.omega_l2 / q.omega_l2) / steps,
                            std::log2(p.gamma_l2 / q.gamma_l2) / steps,
                            std::log2(p.gcm_l2 / q.gcm_l2) / steps});
  }
  return study;
}

}  // namespace surfrec
