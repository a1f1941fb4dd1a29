#include "surfrec/coefficients.hpp"

#include <limits>
#include <sstream>

namespace surfrec {

namespace {

Mat3d block_extend(const Mat2d& m) {
  Mat3d out = Mat3d::Zero();
  out.topLeftCorner<2, 2>() = m;
  out(2, 2) = 1.0;
  return out;
}

}  // namespace

GridField<SpdMat2d> validate_metric(const GridField<SymMat2d>& a, const CoefficientOptions& opts) {
  GridField<SpdMat2d> out(a.spec());
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      const SymMat2d& m = a(i, j);
      if (!m.is_finite() || !(m.det() > opts.eps_det) || !(m.trace() > 0.0)) {
        std::ostringstream os;
        os << "first fundamental form is not positive definite at node (" << i << ", " << j
           << "): det " << m.det() << ", trace " << m.trace();
        throw HypothesisError(os.str());
      }
      const double lam = min_eig_sym2(m);
      if (lam < opts.lambda_min) {
        std::ostringstream os;
        os << "first fundamental form violates the uniform lower eigenvalue bound at node (" << i
           << ", " << j << "): lambda_min " << lam << " < " << opts.lambda_min;
        throw HypothesisError(os.str());
      }
      out(i, j) = SpdMat2d::trusted(m);
    }
  }
  return out;
}

GridField<Christoffel> christoffel(const GridField<SpdMat2d>& a, const CoefficientOptions& opts) {
  const auto sym = map_field(a, [](const SpdMat2d& m) { return m.sym(); });
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      const double lam = min_eig_sym2(sym(i, j));
      if (lam < opts.lambda_min) {
        std::ostringstream os;
        os << "christoffel: metric eigenvalue " << lam << " at node (" << i << ", " << j
           << ") is below the floor " << opts.lambda_min;
        throw HypothesisError(os.str());
      }
    }
  }
  const std::array<GridField<SymMat2d>, 2> da{partial(sym, Axis::x), partial(sym, Axis::y)};

  GridField<Christoffel> out(a.spec());
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      const Mat2d inv = invert_spd2(a(i, j), 0.0).matrix();
      const std::array<const SymMat2d*, 2> d{&da[0](i, j), &da[1](i, j)};
      Christoffel c;
      for (int p = 0; p < 2; ++p) {
        for (int q = p; q < 2; ++q) {
          // first kind, lowered index l
          Vec2d lowered;
          for (int l = 0; l < 2; ++l)
            lowered(l) = 0.5 * ((*d[q])(p, l) + (*d[p])(q, l) - (*d[l])(p, q));
          const Vec2d raised = inv * lowered;
          for (int k = 0; k < 2; ++k) {
            c.upper[k](p, q) = raised(k);
            c.upper[k](q, p) = raised(k);
          }
        }
      }
      out(i, j) = c;
    }
  }
  return out;
}

ExtendedMetric extend_metric(const GridField<SpdMat2d>& a) {
  ExtendedMetric out{GridField<Mat3d>(a.spec()), GridField<Mat3d>(a.spec())};
  for (int j = 0; j < a.ny(); ++j) {
    for (int i = 0; i < a.nx(); ++i) {
      const SpdMat2d root = sqrt_spd2(a(i, j));
      out.G(i, j) = block_extend(root.matrix());
      out.G_inv(i, j) = block_extend(invert_spd2(root, 0.0).matrix());
    }
  }
  return out;
}

GridField<Mat2d> mixed_second_form(const GridField<SymMat2d>& b, const GridField<SpdMat2d>& a_inv) {
  return zip_fields(b, a_inv, [](const SymMat2d& bb, const SpdMat2d& ai) -> Mat2d {
    return bb.matrix() * ai.matrix();
  });
}

std::array<GridField<Mat3d>, 2> connection_matrices(const GridField<Christoffel>& gamma,
                                                    const GridField<SymMat2d>& b,
                                                    const GridField<SpdMat2d>& a_inv) {
  require_same_grid(gamma.spec(), b.spec(), "connection_matrices");
  require_same_grid(gamma.spec(), a_inv.spec(), "connection_matrices");
  const GridField<Mat2d> bm = mixed_second_form(b, a_inv);
  std::array<GridField<Mat3d>, 2> out{GridField<Mat3d>(b.spec()), GridField<Mat3d>(b.spec())};
  for (int j = 0; j < b.ny(); ++j) {
    for (int i = 0; i < b.nx(); ++i) {
      for (int d = 0; d < 2; ++d) {
        Mat3d m = Mat3d::Zero();
        for (int k = 0; k < 2; ++k) {
          for (int c = 0; c < 2; ++c) m(k, c) = gamma(i, j)(k, d, c);
          m(k, 2) = -bm(i, j)(d, k);
          m(2, k) = b(i, j)(d, k);
        }
        out[d](i, j) = m;
      }
    }
  }
  return out;
}

GaugeResult gauge_omega(const GridField<Mat3d>& G, const GridField<Mat3d>& G_inv,
                        const std::array<GridField<Mat3d>, 2>& gamma) {
  require_same_grid(G.spec(), G_inv.spec(), "gauge_omega");
  const std::array<GridField<Mat3d>, 2> dG{partial(G, Axis::x), partial(G, Axis::y)};
  GaugeResult out{{GridField<SkewMat3d>(G.spec()), GridField<SkewMat3d>(G.spec())},
                  {GridField<double>(G.spec()), GridField<double>(G.spec())}};
  for (int d = 0; d < 2; ++d) {
    require_same_grid(G.spec(), gamma[d].spec(), "gauge_omega");
    for (int j = 0; j < G.ny(); ++j) {
      for (int i = 0; i < G.nx(); ++i) {
        const Mat3d raw = (G(i, j) * gamma[d](i, j) - dG[d](i, j)) * G_inv(i, j);
        const double defect = (raw + raw.transpose()).norm() / (1.0 + raw.norm());
        out.skew_defect[d](i, j) = defect;
        out.max_skew_defect[d] = std::max(out.max_skew_defect[d], defect);
        out.omega[d](i, j) = SkewMat3d::from_matrix(raw);
      }
    }
  }
  return out;
}

CoefficientBundle build_coefficients(const GridField<SymMat2d>& a, const GridField<SymMat2d>& b,
                                     const CoefficientOptions& opts) {
  require_same_grid(a.spec(), b.spec(), "build_coefficients");
  for (const SymMat2d& m : b.values())
    if (!m.is_finite()) throw HypothesisError("second fundamental form has non-finite entries");

  CoefficientBundle bundle;
  bundle.a = validate_metric(a, opts);
  bundle.b = b;
  bundle.a_inv = map_field(bundle.a, [&](const SpdMat2d& m) { return invert_spd2(m, opts.eps_det); });
  bundle.b_mixed = mixed_second_form(b, bundle.a_inv);
  bundle.christoffel = christoffel(bundle.a, opts);
  ExtendedMetric ext = extend_metric(bundle.a);
  bundle.G = std::move(ext.G);
  bundle.G_inv = std::move(ext.G_inv);
  bundle.Gamma = connection_matrices(bundle.christoffel, b, bundle.a_inv);
  GaugeResult gauge = gauge_omega(bundle.G, bundle.G_inv, bundle.Gamma);
  bundle.Omega = std::move(gauge.omega);
  bundle.skew_defect = std::move(gauge.skew_defect);

  CoefficientDiagnostics& diag = bundle.diag;
  diag.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const SpdMat2d& m : bundle.a.values()) diag.min_eigenvalue = std::min(diag.min_eigenvalue, min_eig_sym2(m.sym()));
  diag.max_skew_defect = gauge.max_skew_defect;
  const double worst = std::max(diag.max_skew_defect[0], diag.max_skew_defect[1]);
  diag.skew_within_tol = worst <= opts.tol_skew;
  if (!diag.skew_within_tol) {
    std::ostringstream os;
    os << "antisymmetry defect of Omega " << worst << " exceeds tol_skew " << opts.tol_skew
       << " (inconsistent inputs or coarse grid); projected onto so(3)";
    if (opts.strict_skew) throw ValidationError(os.str());
    diag.warnings.push_back(os.str());
  }
  return bundle;
}

GridField<Mat3d> as_matrices(const GridField<SkewMat3d>& omega) {
  return map_field(omega, [](const SkewMat3d& w) { return w.matrix(); });
}

}  // namespace surfrec
