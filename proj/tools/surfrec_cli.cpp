// surfrec: command-line front end.
//
// Exit status: 0 success, 1 invalid input or violated hypothesis, 2 numerical
// abort (frame or tangent degeneracy).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "surfrec/compatibility.hpp"
#include "surfrec/config.hpp"
#include "surfrec/corpus.hpp"
#include "surfrec/grid_io.hpp"
#include "surfrec/pfaffian.hpp"
#include "surfrec/reconstruction.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace surfrec;

namespace {

// Flag values land here first; only flags that were actually given are
// copied over the config file values.
struct Flags {
  std::string config;
  int n = 0;
  double x0 = 0.0, y0 = 0.0;
  int margin = 0;
  double lambda_min = 0.0, tol_skew = 0.0, degeneracy_floor = 0.0;
  int threads = 1;
  std::string quadrature, case_name, ns, ks, family, a, b, omega1, omega2, out, report, mesh, format;
  std::vector<std::string> params;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
};

template <typename T, typename Set>
void flag(CLI::App* app, Flags& f, const std::string& name, T& slot, const std::string& help, Set set) {
  CLI::Option* opt = app->add_option(name, slot, help);
  f.overrides.emplace_back(opt, [&slot, set](RunConfig& c) { set(c, slot); });
}

void add_config_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its values");
  flag(app, f, "--margin", f.margin, "interior margin (node layers) for residual norms",
       [](RunConfig& c, int v) { c.margin = v; });
  flag(app, f, "--lambda-min", f.lambda_min, "lower eigenvalue bound required of the first fundamental form",
       [](RunConfig& c, double v) { c.lambda_min = v; });
  flag(app, f, "--tol-skew", f.tol_skew, "tolerance on the antisymmetry defect of Omega",
       [](RunConfig& c, double v) { c.tol_skew = v; });
  flag(app, f, "--degeneracy-floor", f.degeneracy_floor, "abort when |f1 x f2| falls below this",
       [](RunConfig& c, double v) { c.degeneracy_floor = v; });
  flag(app, f, "--threads", f.threads, "worker threads", [](RunConfig& c, int v) { c.threads = v; });
  flag(app, f, "--out", f.out, "output directory", [](RunConfig& c, const std::string& v) { c.out_dir = v; });
  flag(app, f, "--report", f.report, "JSON report path (default <out>/<command>_report.json)",
       [](RunConfig& c, const std::string& v) { c.report = v; });
  flag(app, f, "--format", f.format, "grid file format: bin (JSON header + float64 payload) or csv",
       [](RunConfig& c, const std::string& v) { c.format = v; });
}

void add_forms_flags(CLI::App* app, Flags& f) {
  flag(app, f, "--a", f.a, "first fundamental form grid file (sym2)",
       [](RunConfig& c, const std::string& v) { c.input_a = v; });
  flag(app, f, "--b", f.b, "second fundamental form grid file (sym2)",
       [](RunConfig& c, const std::string& v) { c.input_b = v; });
  flag(app, f, "--case", f.case_name, "corpus case (or 'incompatible') instead of --a/--b",
       [](RunConfig& c, const std::string& v) { c.case_name = v; });
  flag(app, f, "--n", f.n, "cells per side of the unit-square grid", [](RunConfig& c, int v) { c.n = v; });
  flag(app, f, "--x0", f.x0, "grid origin x (default: the case's own)", [](RunConfig& c, double v) { c.x0 = v; });
  flag(app, f, "--y0", f.y0, "grid origin y (default: the case's own)", [](RunConfig& c, double v) { c.y0 = v; });
  CLI::Option* p = app->add_option("--param", f.params, "case parameter override name=value (repeatable)");
  f.overrides.emplace_back(p, [&f](RunConfig& c) {
    for (const std::string& s : f.params) c.params[parse_param(s).first] = parse_param(s).second;
  });
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(cfg, f.config);
  for (const auto& [opt, set] : f.overrides)
    if (opt->count() > 0) set(cfg);
  cfg.validate();
  return cfg;
}

std::string grid_path(const RunConfig& cfg, const std::string& stem) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / (stem + (cfg.format == "csv" ? ".csv" : ""))).string();
}

json grid_json(const GridSpec& s) {
  return {{"x0", s.x0}, {"y0", s.y0}, {"h", s.h}, {"nx", s.nx}, {"ny", s.ny}};
}

void write_report(const RunConfig& cfg, const std::string& command, json results) {
  json doc;
  doc["command"] = command;
  doc["config"] = json::parse(config_to_json(cfg));
  doc["results"] = std::move(results);
  std::string path = cfg.report;
  if (path.empty()) {
    fs::create_directories(cfg.out_dir);
    path = (fs::path(cfg.out_dir) / (command + "_report.json")).string();
  } else if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open report '" + path + "' for writing");
  os << doc.dump(2) << '\n';
  std::printf("report: %s\n", path.c_str());
}

GridSpec case_grid(const RunConfig& cfg, const corpus::FormsCase& fc) {
  GridSpec g = fc.grid(cfg.n);
  if (cfg.x0) g.x0 = *cfg.x0;
  if (cfg.y0) g.y0 = *cfg.y0;
  return g;
}

struct Forms {
  GridField<SymMat2d> a;
  GridField<SymMat2d> b;
  std::string source;
};

Forms load_forms(const RunConfig& cfg) {
  const bool files = !cfg.input_a.empty() || !cfg.input_b.empty();
  if (files && !cfg.case_name.empty()) throw ValidationError("give either --a/--b or --case, not both");
  if (files) {
    if (cfg.input_a.empty() || cfg.input_b.empty()) throw ValidationError("--a and --b must be given together");
    Forms f{read_grid<SymMat2d>(cfg.input_a), read_grid<SymMat2d>(cfg.input_b), "files"};
    require_same_grid(f.a.spec(), f.b.spec(), "input forms");
    return f;
  }
  if (cfg.case_name.empty()) throw ValidationError("no input: give --a/--b or --case");
  const corpus::FormsCase fc = corpus::forms_case(cfg.case_name, cfg.params);
  corpus::SampledCase s = fc.sample(case_grid(cfg, fc));
  return {std::move(s.a), std::move(s.b), "case " + fc.name};
}

json compat_json(const CompatReport& r) {
  return {{"margin", r.margin},
          {"omega_residual_l2", r.omega_residual_l2},
          {"gamma_residual_l2", r.gamma_residual_l2},
          {"gauss_residual_l2", r.gauss_residual_l2},
          {"codazzi_residual_l2", r.codazzi_residual_l2},
          {"gcm_residual_l2", r.gcm_residual_l2()},
          {"omega_residual_max", r.omega_residual_max},
          {"gauss_residual_max", r.gauss_residual_max},
          {"codazzi_residual_max", r.codazzi_residual_max}};
}

json frame_json(const FrameDiagnostics& d) {
  return {{"max_defect_before_projection", d.max_defect_before_projection},
          {"projection_count", d.projection_count},
          {"node_count", d.node_count},
          {"max_orthogonality_defect", d.max_orthogonality_defect},
          {"max_det_deviation", d.max_det_deviation},
          {"gradient_energy_ratio", d.gradient_energy_ratio}};
}

json holonomy_json(const HolonomyReport& h) { return {{"max", h.max}, {"l2", h.l2}, {"cells", h.angle.size()}}; }

json coeff_json(const CoefficientBundle& b) {
  return {{"min_eigenvalue", b.diag.min_eigenvalue},
          {"max_skew_defect", b.diag.max_skew_defect},
          {"skew_within_tol", b.diag.skew_within_tol},
          {"warnings", b.diag.warnings}};
}

void print_warnings(const std::vector<std::string>& w) {
  for (const std::string& s : w) std::printf("warning: %s\n", s.c_str());
}

// ---------------------------------------------------------------------------

void cmd_corpus_list() {
  for (const std::string& name : corpus::case_names()) {
    const corpus::CorpusCase c = corpus::make_case(name);
    std::printf("%-9s", name.c_str());
    for (const auto& [k, v] : c.params()) std::printf(" %s=%g", k.c_str(), v);
    const corpus::Rect& r = c.admissible();
    std::printf("  domain [%g, %g] x [%g, %g]  eigen floor %g\n", r.x_min, r.x_max, r.y_min, r.y_max, c.eigen_floor());
  }
  std::printf("%-9s a = I, b = I (tagged incompatible)\n", "incompatible");
}

void cmd_corpus_dump(const RunConfig& cfg) {
  const corpus::CorpusCase c = corpus::make_case(cfg.case_name, cfg.params);
  GridSpec g = c.grid(cfg.n);
  if (cfg.x0) g.x0 = *cfg.x0;
  if (cfg.y0) g.y0 = *cfg.y0;
  const corpus::SampledCase s = c.sample(g);
  const std::string stem = c.name();
  const std::string pt = grid_path(cfg, stem + "_theta");
  const std::string pa = grid_path(cfg, stem + "_a");
  const std::string pb = grid_path(cfg, stem + "_b");
  write_grid(pt, s.theta);
  write_grid(pa, s.a);
  write_grid(pb, s.b);
  const corpus::ConsistencyResult chk = corpus::check_consistency(c);
  const corpus::Rect& r = c.admissible();
  std::printf("%s: wrote %s, %s, %s (%dx%d nodes)\n", stem.c_str(), pt.c_str(), pa.c_str(), pb.c_str(), g.nx, g.ny);
  write_report(cfg, "corpus",
               {{"case", stem},
                {"params", c.params()},
                {"grid", grid_json(g)},
                {"admissible", {r.x_min, r.x_max, r.y_min, r.y_max}},
                {"eigen_floor", c.eigen_floor()},
                {"normal", corpus::CorpusCase::normal_orientation},
                {"consistency", {{"max_rel_error_a", chk.max_rel_error_a}, {"max_rel_error_b", chk.max_rel_error_b}}},
                {"files", {{"theta", pt}, {"a", pa}, {"b", pb}}}});
}

void cmd_build_omega(const RunConfig& cfg) {
  const Forms f = load_forms(cfg);
  const CoefficientBundle b = build_coefficients(f.a, f.b, cfg.coefficient_options());
  const std::string p1 = grid_path(cfg, "omega1");
  const std::string p2 = grid_path(cfg, "omega2");
  const std::string pc = grid_path(cfg, "christoffel");
  const std::string pg = grid_path(cfg, "G");
  write_grid(p1, b.Omega[0]);
  write_grid(p2, b.Omega[1]);
  write_grid(pc, b.christoffel);
  write_grid(pg, b.G);
  print_warnings(b.diag.warnings);
  std::printf("build-omega (%s): min eigenvalue %.6g, max antisymmetry defect %.3e / %.3e\n", f.source.c_str(),
              b.diag.min_eigenvalue, b.diag.max_skew_defect[0], b.diag.max_skew_defect[1]);
  write_report(cfg, "build-omega",
               {{"source", f.source},
                {"grid", grid_json(b.spec())},
                {"coefficients", coeff_json(b)},
                {"files", {{"omega1", p1}, {"omega2", p2}, {"christoffel", pc}, {"G", pg}}}});
}

void cmd_check_compat(const RunConfig& cfg, bool dump_fields) {
  const Forms f = load_forms(cfg);
  const CoefficientBundle b = build_coefficients(f.a, f.b, cfg.coefficient_options());
  const CompatReport r = check_compatibility(b, cfg.margin);
  json files = json::object();
  if (dump_fields) {
    files["omega_residual"] = grid_path(cfg, "omega_residual");
    files["gamma_residual"] = grid_path(cfg, "gamma_residual");
    files["gauss_residual"] = grid_path(cfg, "gauss_residual");
    files["codazzi1_residual"] = grid_path(cfg, "codazzi1_residual");
    files["codazzi2_residual"] = grid_path(cfg, "codazzi2_residual");
    write_grid(files["omega_residual"].get<std::string>(), r.omega);
    write_grid(files["gamma_residual"].get<std::string>(), r.gamma);
    write_grid(files["gauss_residual"].get<std::string>(), r.gauss);
    write_grid(files["codazzi1_residual"].get<std::string>(), r.codazzi[0]);
    write_grid(files["codazzi2_residual"].get<std::string>(), r.codazzi[1]);
  }
  print_warnings(b.diag.warnings);
  std::printf("check-compat (%s, margin %d): omega %.3e  gamma %.3e  gauss %.3e  codazzi %.3e %.3e\n",
              f.source.c_str(), r.margin, r.omega_residual_l2, r.gamma_residual_l2, r.gauss_residual_l2,
              r.codazzi_residual_l2[0], r.codazzi_residual_l2[1]);
  write_report(cfg, "check-compat",
               {{"source", f.source},
                {"grid", grid_json(b.spec())},
                {"coefficients", coeff_json(b)},
                {"compatibility", compat_json(r)},
                {"files", files}});
}

void cmd_solve_frame(const RunConfig& cfg, const std::string& base_text, const std::string& convention) {
  if (cfg.input_omega1.empty() || cfg.input_omega2.empty())
    throw ValidationError("solve-frame needs --omega1 and --omega2");
  const std::array<GridField<SkewMat3d>, 2> omega{read_grid<SkewMat3d>(cfg.input_omega1),
                                                  read_grid<SkewMat3d>(cfg.input_omega2)};
  require_same_grid(omega[0].spec(), omega[1].spec(), "solve-frame");
  GridIndex base = omega[0].spec().center();
  if (!base_text.empty()) {
    const std::vector<int> ij = parse_int_list(base_text);
    if (ij.size() != 2) throw ValidationError("--base must look like i,j");
    base = {ij[0], ij[1]};
  }
  SolveOptions so;
  if (convention == "left")
    so.convention = Convention::left;
  else if (convention != "right")
    throw ValidationError("--convention must be 'right' or 'left'");
  so.threads = cfg.threads;
  const FrameField3 fr = solve_frame(omega, base, Mat3d::Identity(), so);
  const HolonomyReport hol = plaquette_holonomy(omega, so.convention);
  const std::string pf = grid_path(cfg, "frame");
  write_grid(pf, fr.P);
  std::printf("solve-frame: %zu nodes, %zu projections, max orthogonality defect %.3e, max holonomy %.3e\n",
              fr.diag.node_count, fr.diag.projection_count, fr.diag.max_orthogonality_defect, hol.max);
  write_report(cfg, "solve-frame",
               {{"grid", grid_json(omega[0].spec())},
                {"base", {base.i, base.j}},
                {"convention", convention},
                {"frame", frame_json(fr.diag)},
                {"holonomy", holonomy_json(hol)},
                {"files", {{"frame", pf}}}});
}

void cmd_reconstruct(const RunConfig& cfg) {
  const Forms f = load_forms(cfg);
  const ImmersionResult r = reconstruct(f.a, f.b, cfg.reconstruct_options());
  const ReconstructDiagnostics& d = r.diagnostics;
  const std::string pt = grid_path(cfg, "theta");
  const std::string pf = grid_path(cfg, "frame");
  write_grid(pt, r.theta);
  write_grid(pf, r.frame.P);
  json files{{"theta", pt}, {"frame", pf}};
  if (!cfg.mesh.empty()) {
    write_obj(cfg.mesh, r.theta, &r.frame.P);
    files["mesh"] = cfg.mesh;
  }
  json results{{"source", f.source},
               {"grid", grid_json(r.bundle.spec())},
               {"coefficients", coeff_json(r.bundle)},
               {"compatibility", compat_json(d.compat)},
               {"holonomy", holonomy_json(d.holonomy)},
               {"frame", frame_json(d.frame)},
               {"recovered_forms",
                {{"a_l2", d.recovered_forms.a_l2},
                 {"b_l2", d.recovered_forms.b_l2},
                 {"a_max", d.recovered_forms.a_max},
                 {"b_max", d.recovered_forms.b_max}}},
               {"min_tangent_cross", d.min_tangent_cross},
               {"factorization_defect", d.factorization_defect},
               {"normal_defect", d.normal_defect},
               {"warnings", d.warnings},
               {"files", files}};
  // With a corpus case the analytic immersion is known; report the aligned error too.
  if (!cfg.case_name.empty() && cfg.case_name != "incompatible") {
    const corpus::CorpusCase c = corpus::make_case(cfg.case_name, cfg.params);
    const GridField<Vec3d> exact = c.sample(r.theta.spec()).theta;
    const Alignment al = align_rigid(r.theta, exact);
    results["aligned_error"] = {{"max", al.max_error}, {"rms", al.rms}};
  }
  print_warnings(d.warnings);
  std::printf("reconstruct (%s): recovered-form L2 errors a %.3e b %.3e, max holonomy %.3e, min |f1 x f2| %.4g\n",
              f.source.c_str(), d.recovered_forms.a_l2, d.recovered_forms.b_l2, d.holonomy.max, d.min_tangent_cross);
  write_report(cfg, "reconstruct", results);
}

void cmd_roundtrip(const RunConfig& cfg) {
  if (cfg.case_name.empty()) throw ValidationError("roundtrip needs --case");
  const corpus::CorpusCase c = corpus::make_case(cfg.case_name, cfg.params);
  const std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{cfg.n} : cfg.ns;
  const RoundtripStudy st = roundtrip_study(c, ns, cfg.reconstruct_options());
  json rows = json::array();
  std::printf("%6s %12s %12s %12s %12s %12s\n", "n", "theta_max", "a_l2", "b_l2", "skew", "holonomy");
  for (const RoundtripRow& r : st.rows) {
    std::printf("%6d %12.4e %12.4e %12.4e %12.4e %12.4e\n", r.n, r.theta_max_error, r.forms.a_l2, r.forms.b_l2,
                r.max_skew_defect, r.holonomy_max);
    rows.push_back({{"n", r.n},
                    {"h", r.h},
                    {"theta_max_error", r.theta_max_error},
                    {"theta_rms_error", r.theta_rms_error},
                    {"a_l2", r.forms.a_l2},
                    {"b_l2", r.forms.b_l2},
                    {"max_skew_defect", r.max_skew_defect},
                    {"omega_residual_l2", r.omega_residual_l2},
                    {"holonomy_max", r.holonomy_max},
                    {"projection_count", r.projection_count},
                    {"node_count", r.node_count},
                    {"max_orthogonality_defect", r.max_orthogonality_defect},
                    {"max_det_deviation", r.max_det_deviation}});
  }
  json orders = json::array();
  for (const auto& o : st.orders) {
    std::printf("order %28.3f %12.3f %12.3f\n", o[0], o[1], o[2]);
    orders.push_back({{"theta_max", o[0]}, {"a_l2", o[1]}, {"b_l2", o[2]}});
  }
  write_report(cfg, "roundtrip", {{"case", st.case_name}, {"params", c.params()}, {"rows", rows}, {"orders", orders}});
}

void cmd_compactness(const RunConfig& cfg) {
  const FormsFamily fam = forms_family(cfg.family);
  const std::vector<double> ks = cfg.ks.empty() ? std::vector<double>{2, 4, 8, 16} : cfg.ks;
  const CompactnessReport rep = compactness_experiment(fam, ks, cfg.n, cfg.reconstruct_options());
  json rows = json::array();
  std::printf("%8s %12s %12s %12s %12s\n", "k", "theta_l2", "theta_w12", "theta_w22", "frame_w12");
  for (const CompactnessRow& r : rep.rows) {
    std::printf("%8g %12.4e %12.4e %12.4e %12.4e\n", r.k, r.theta_l2, r.theta_w12, r.theta_w22, r.frame_w12);
    rows.push_back({{"k", r.k},
                    {"theta_l2", r.theta_l2},
                    {"theta_w12", r.theta_w12},
                    {"theta_w22", r.theta_w22},
                    {"frame_w12", r.frame_w12},
                    {"weak_pairings", r.pairings}});
  }
  std::printf("strong norms decrease: %s, weak pairings decrease: %s\n", rep.strong_monotone ? "yes" : "no",
              rep.pairings_monotone ? "yes" : "no");
  write_report(cfg, "compactness",
               {{"family", rep.family},
                {"n", rep.n},
                {"rows", rows},
                {"w22_ratios", rep.w22_ratios},
                {"strong_monotone", rep.strong_monotone},
                {"pairings_monotone", rep.pairings_monotone}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface reconstruction from first and second fundamental forms"};
  app.require_subcommand(1);

  Flags corpus_flags, omega_flags, compat_flags, frame_flags, rec_flags, rt_flags, cmp_flags;

  CLI::App* corpus_cmd = app.add_subcommand("corpus", "analytic test surfaces");
  corpus_cmd->require_subcommand(1);
  corpus_cmd->add_subcommand("list", "list the shipped surfaces");
  CLI::App* dump = corpus_cmd->add_subcommand("dump", "write theta, a, b of a corpus surface");
  dump->add_option("name", corpus_flags.case_name, "surface name")->required();
  add_config_flags(dump, corpus_flags);
  flag(dump, corpus_flags, "--n", corpus_flags.n, "cells per side", [](RunConfig& c, int v) { c.n = v; });
  flag(dump, corpus_flags, "--x0", corpus_flags.x0, "grid origin x", [](RunConfig& c, double v) { c.x0 = v; });
  flag(dump, corpus_flags, "--y0", corpus_flags.y0, "grid origin y", [](RunConfig& c, double v) { c.y0 = v; });
  CLI::Option* dump_params = dump->add_option("--param", corpus_flags.params, "parameter override name=value");
  corpus_flags.overrides.emplace_back(dump_params, [&corpus_flags](RunConfig& c) {
    for (const std::string& s : corpus_flags.params) c.params[parse_param(s).first] = parse_param(s).second;
  });

  CLI::App* omega_cmd = app.add_subcommand("build-omega", "coefficient chain (a, b) -> Omega");
  add_config_flags(omega_cmd, omega_flags);
  add_forms_flags(omega_cmd, omega_flags);

  bool dump_fields = false;
  CLI::App* compat_cmd = app.add_subcommand("check-compat", "residuals of the compatibility conditions");
  add_config_flags(compat_cmd, compat_flags);
  add_forms_flags(compat_cmd, compat_flags);
  compat_cmd->add_flag("--dump-fields", dump_fields, "also write the per-node residual fields");

  std::string base_text, convention = "right";
  CLI::App* frame_cmd = app.add_subcommand("solve-frame", "integrate dP = P Omega from Omega dumps");
  add_config_flags(frame_cmd, frame_flags);
  flag(frame_cmd, frame_flags, "--omega1", frame_flags.omega1, "Omega_1 grid file (skew3)",
       [](RunConfig& c, const std::string& v) { c.input_omega1 = v; });
  flag(frame_cmd, frame_flags, "--omega2", frame_flags.omega2, "Omega_2 grid file (skew3)",
       [](RunConfig& c, const std::string& v) { c.input_omega2 = v; });
  frame_cmd->add_option("--base", base_text, "base node i,j (default: grid centre)");
  frame_cmd->add_option("--convention", convention, "right (dP = P Omega) or left (dP + Omega P = 0)");

  CLI::App* rec_cmd = app.add_subcommand("reconstruct", "full pipeline (a, b) -> theta");
  add_config_flags(rec_cmd, rec_flags);
  add_forms_flags(rec_cmd, rec_flags);
  flag(rec_cmd, rec_flags, "--mesh", rec_flags.mesh, "also write an OBJ mesh",
       [](RunConfig& c, const std::string& v) { c.mesh = v; });
  flag(rec_cmd, rec_flags, "--quadrature", rec_flags.quadrature, "lie (default) or trapezoid",
       [](RunConfig& c, const std::string& v) { c.quadrature = v; });

  CLI::App* rt_cmd = app.add_subcommand("roundtrip", "refinement study against a corpus surface");
  add_config_flags(rt_cmd, rt_flags);
  flag(rt_cmd, rt_flags, "--case", rt_flags.case_name, "corpus surface",
       [](RunConfig& c, const std::string& v) { c.case_name = v; });
  flag(rt_cmd, rt_flags, "--n", rt_flags.ns, "comma-separated cells per side, e.g. 16,32,64",
       [](RunConfig& c, const std::string& v) { c.ns = parse_int_list(v); });
  flag(rt_cmd, rt_flags, "--quadrature", rt_flags.quadrature, "lie (default) or trapezoid",
       [](RunConfig& c, const std::string& v) { c.quadrature = v; });
  CLI::Option* rt_params = rt_cmd->add_option("--param", rt_flags.params, "parameter override name=value");
  rt_flags.overrides.emplace_back(rt_params, [&rt_flags](RunConfig& c) {
    for (const std::string& s : rt_flags.params) c.params[parse_param(s).first] = parse_param(s).second;
  });

  CLI::App* cmp_cmd = app.add_subcommand("compactness", "convergence of a family of forms to its limit");
  add_config_flags(cmp_cmd, cmp_flags);
  flag(cmp_cmd, cmp_flags, "--family", cmp_flags.family, "sphere-radius, cylinder-curvature or constant",
       [](RunConfig& c, const std::string& v) { c.family = v; });
  flag(cmp_cmd, cmp_flags, "--ks", cmp_flags.ks, "comma-separated family indices, e.g. 2,4,8,16",
       [](RunConfig& c, const std::string& v) { c.ks = parse_double_list(v); });
  flag(cmp_cmd, cmp_flags, "--n", cmp_flags.n, "cells per side", [](RunConfig& c, int v) { c.n = v; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (corpus_cmd->parsed()) {
      if (dump->parsed()) {
        RunConfig cfg = resolve(corpus_flags);
        cfg.case_name = corpus_flags.case_name;
        cmd_corpus_dump(cfg);
      } else {
        cmd_corpus_list();
      }
    } else if (omega_cmd->parsed()) {
      cmd_build_omega(resolve(omega_flags));
    } else if (compat_cmd->parsed()) {
      cmd_check_compat(resolve(compat_flags), dump_fields);
    } else if (frame_cmd->parsed()) {
      cmd_solve_frame(resolve(frame_flags), base_text, convention);
    } else if (rec_cmd->parsed()) {
      cmd_reconstruct(resolve(rec_flags));
    } else if (rt_cmd->parsed()) {
      cmd_roundtrip(resolve(rt_flags));
    } else if (cmp_cmd->parsed()) {
      cmd_compactness(resolve(cmp_flags));
    }
  } catch (const DegeneracyError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return 2;
  } catch (const HypothesisError& e) {
    std::fprintf(stderr, "hypothesis violated: %s\n", e.what());
    return 1;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
