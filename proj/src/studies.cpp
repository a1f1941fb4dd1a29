#include <cmath>
#include <numbers>
#include <sstream>

#include "surfrec/parallel.hpp"
#include "surfrec/reconstruction.hpp"

namespace surfrec {

RoundtripStudy roundtrip_study(const corpus::CorpusCase& c, const std::vector<int>& ns,
                               const ReconstructOptions& opts) {
  RoundtripStudy study{c.name(), {}, {}};
  for (int n : ns) {
    const GridSpec grid = c.grid(n);
    const corpus::SampledCase data = c.sample(grid);
    const ImmersionResult rec = reconstruct(data.a, data.b, opts);
    const Alignment al = align_rigid(rec.theta, data.theta);
    const ReconstructDiagnostics& d = rec.diagnostics;
    RoundtripRow row;
    row.n = n;
    row.h = grid.h;
    row.theta_max_error = al.max_error;
    row.theta_rms_error = al.rms;
    row.forms = d.recovered_forms;
    row.max_skew_defect = std::max(rec.bundle.diag.max_skew_defect[0], rec.bundle.diag.max_skew_defect[1]);
    row.omega_residual_l2 = d.compat.omega_residual_l2;
    row.holonomy_max = d.holonomy.max;
    row.projection_count = d.frame.projection_count;
    row.node_count = d.frame.node_count;
    row.max_orthogonality_defect = d.frame.max_orthogonality_defect;
    row.max_det_deviation = d.frame.max_det_deviation;
    study.rows.push_back(row);
  }
  for (std::size_t r = 1; r < study.rows.size(); ++r) {
    const RoundtripRow& p = study.rows[r - 1];
    const RoundtripRow& q = study.rows[r];
    const double steps = std::log2(p.h / q.h);
    study.orders.push_back({std::log2(p.theta_max_error / q.theta_max_error) / steps,
                            std::log2(p.forms.a_l2 / q.forms.a_l2) / steps,
                            std::log2(p.forms.b_l2 / q.forms.b_l2) / steps});
  }
  return study;
}

std::vector<std::string> family_names() { return {"sphere-radius", "cylinder-curvature", "constant"}; }

FormsFamily forms_family(const std::string& name) {
  if (name == "sphere-radius") {
    return {name, [](double k) { return corpus::make_case("sphere", {{"radius", 1.0 + 1.0 / k}}); },
            corpus::make_case("sphere")};
  }
  if (name == "cylinder-curvature") {
    return {name, [](double k) { return corpus::make_case("cylinder", {{"curvature", 1.0 + 1.0 / k}}); },
            corpus::make_case("cylinder")};
  }
  if (name == "constant") {
    return {name, [](double) { return corpus::make_case("sphere"); }, corpus::make_case("sphere")};
  }
  std::ostringstream os;
  os << "unknown family '" << name << "'";
  throw ValidationError(os.str());
}

double weak_test_function(int index, double s, double t) {
  static constexpr int freq[kWeakTestCount][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0},
                                                  {0, 2}, {2, 1}, {1, 2}, {2, 2}, {3, 1}};
  if (index < 0 || index >= kWeakTestCount) throw ValidationError("weak test function index out of range");
  if (s <= 0.0 || s >= 1.0 || t <= 0.0 || t >= 1.0) return 0.0;
  const double bubble = 16.0 * s * (1.0 - s) * t * (1.0 - t);
  const double pi = std::numbers::pi;
  return bubble * bubble * std::cos(pi * (freq[index][0] * s + freq[index][1] * t));
}

CompactnessReport compactness_experiment(const FormsFamily& family, const std::vector<double>& ks, int n,
                                         const ReconstructOptions& opts) {
  if (ks.empty()) throw ValidationError("compactness experiment needs at least one k");
  for (double k : ks)
    if (!(k > 0.0)) throw ValidationError("family index k must be positive");

  const GridSpec grid = family.limit.grid(n);
  const corpus::SampledCase lim_data = family.limit.sample(grid);
  const ImmersionResult lim = reconstruct(lim_data.a, lim_data.b, opts);
  const int margin = opts.margin;

  // Members are independent; each worker writes its own row.
  CompactnessReport rep;
  rep.family = family.name;
  rep.n = n;
  rep.rows.resize(ks.size());
  ReconstructOptions inner = opts;
  inner.threads = 1;
  parallel_for(static_cast<int>(ks.size()), opts.threads, [&](int idx) {
    const double k = ks[idx];
    const corpus::CorpusCase member = family.member(k);
    const corpus::SampledCase data = member.sample(grid);
    const ImmersionResult rec = reconstruct(data.a, data.b, inner);
    const Alignment al = align_rigid(rec.theta, lim.theta);
    const GridField<Vec3d> diff = apply(al.motion, rec.theta) - lim.theta;
    const GridField<Vec3d> inner_diff = restrict_interior(diff, margin);
    const GridField<Mat3d> frame_diff = restrict_interior(
        zip_fields(rec.frame.P, lim.frame.P,
                   [&](const Mat3d& pk, const Mat3d& p) -> Mat3d { return al.motion.C * pk - p; }),
        margin);

    CompactnessRow row;
    row.k = k;
    row.theta_l2 = norm_l2(inner_diff);
    row.theta_w12 = norm_w12(inner_diff);
    row.theta_w22 = norm_w22(inner_diff);
    row.frame_w12 = norm_w12(frame_diff);
    const double h = grid.h;
    const double sx = grid.x_max() - grid.x0;
    const double sy = grid.y_max() - grid.y0;
    for (int m = 0; m < kWeakTestCount; ++m) {
      Vec3d acc = Vec3d::Zero();
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
          acc += weak_test_function(m, (grid.x(i) - grid.x0) / sx, (grid.y(j) - grid.y0) / sy) * diff(i, j);
      row.pairings[m] = (h * h * acc).norm();
    }
    rep.rows[idx] = row;
  });

  rep.strong_monotone = true;
  rep.pairings_monotone = true;
  for (std::size_t r = 1; r < rep.rows.size(); ++r) {
    const CompactnessRow& p = rep.rows[r - 1];
    const CompactnessRow& q = rep.rows[r];
    rep.w22_ratios.push_back(q.theta_w22 / p.theta_w22);
    if (!(q.theta_w22 < p.theta_w22)) rep.strong_monotone = false;
    for (int m = 0; m < kWeakTestCount; ++m)
      if (!(q.pairings[m] < p.pairings[m])) rep.pairings_monotone = false;
  }
  return rep;
}

}  // namespace surfrec
