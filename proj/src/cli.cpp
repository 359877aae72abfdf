#include "susylab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>

#include "susylab/duality.hpp"
#include "susylab/errors.hpp"
#include "susylab/greens.hpp"
#include "susylab/io.hpp"
#include "susylab/saddle.hpp"
#include "susylab/susy.hpp"
#include "susylab/sw.hpp"

namespace susylab {

namespace {

using json = nlohmann::ordered_json;

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  unsigned workers;
  std::ostream& log;
  std::string hash;
  json report;

  McConfig mc() const { return {cfg.integer("params.num_samples"), cfg.seed(), workers}; }
  std::size_t site(const char* key) const {
    const std::int64_t s = cfg.integer(key);
    if (s < 0) throw ConfigError(std::string("key '") + key + "' must be >= 0");
    return static_cast<std::size_t>(s);
  }
  int positive(const char* key) const {
    const std::int64_t v = cfg.integer(key);
    if (v < 1) throw ConfigError(std::string("key '") + key + "' must be >= 1");
    return static_cast<int>(v);
  }
  SignatureSpec sig() const { return SignatureSpec::of(cfg.complex_list("params.z")); }
  void csv(const std::string& name, const CsvTable& t) const {
    t.write((dir / name).string(), hash);
    log << "wrote " << (dir / name).string() << "\n";
  }
  SwQuadConfig quad() const {
    SwQuadConfig q;
    q.r_nodes = positive("params.r_nodes");
    q.r_tail = cfg.real("params.r_tail");
    q.p_tail = cfg.real("params.p_tail");
    q.h_factor = cfg.real("params.h_factor");
    q.chi_nodes = positive("params.chi_nodes");
    q.gh_nodes = positive("params.gh_nodes");
    return q;
  }
  double lambda(const EnsembleSpec& spec) const {
    const double l = cfg.real("params.lambda");
    return l == 0.0 ? default_lambda(spec) : l;
  }
};

json estimate_json(const GreensEstimate& e) {
  return {{"re", e.value.real()}, {"im", e.value.imag()}, {"se_re", e.se_re}, {"se_im", e.se_im},
          {"num_samples", e.num_samples}, {"seed", e.seed}, {"retries", e.retries}, {"flagged", e.flagged}};
}

json complex_json(cd v) { return {{"re", v.real()}, {"im", v.imag()}}; }

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::consistent: return kExitOk;
    case Verdict::inconsistent: return kExitInconsistent;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

// duality_summary.csv plus the report fields; returns the verdict exit code
int emit_duality(Context& c, const EnsembleSpec& spec, const SignatureSpec& sig, const DualityReport& r) {
  CsvTable t({"op", "n", "p", "N", "L", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "z", "verdict", "seed"});
  t.cell(r.op).cell(sig.n()).cell(sig.p()).cell(spec.orbitals).cell(static_cast<std::uint64_t>(spec.num_sites()));
  t.cell(r.lhs.value.real()).cell(r.lhs.value.imag()).cell(r.rhs.value.real()).cell(r.rhs.value.imag());
  t.cell(r.z_score).cell(to_string(r.verdict)).cell(c.cfg.seed());
  t.end_row();
  c.csv("duality_summary.csv", t);
  c.report["lhs"] = estimate_json(r.lhs);
  c.report["rhs"] = estimate_json(r.rhs);
  c.report["z_score"] = r.z_score;
  c.report["verdict"] = to_string(r.verdict);
  c.report["lhs_median"] = complex_json(r.lhs_median);
  c.report["rhs_median"] = complex_json(r.rhs_median);
  c.report["lhs_tail_ratio"] = r.lhs_tail_ratio;
  c.report["rhs_tail_ratio"] = r.rhs_tail_ratio;
  json cfg = json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  c.report["quadrature_config"] = cfg;
  c.report["notes"] = r.notes;
  c.log << r.op << ": z = " << r.z_score << " (" << to_string(r.verdict) << ")\n";
  return verdict_exit(r.verdict);
}

int op_sample(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const int count = c.positive("params.count");
  CsvTable t({"draw", "row", "col", "re", "im"});
  for (int d = 0; d < count; ++d) {
    const HermitianSample s = sample(spec, c.cfg.seed(), static_cast<std::uint64_t>(d));
    for (Eigen::Index i = 0; i < s.matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < s.matrix.cols(); ++j) {
        t.cell(d).cell(static_cast<std::int64_t>(i)).cell(static_cast<std::int64_t>(j));
        t.cell(s.matrix(i, j).real()).cell(s.matrix(i, j).imag());
        t.end_row();
      }
  }
  c.csv("sample.csv", t);
  c.report["count"] = count;
  c.report["dim"] = spec.dim();
  return kExitOk;
}

int op_validate_cov(Context& c) {
  const ValidationReport v = c.cfg.ensemble().covariance.report;
  CsvTable t({"check", "value"});
  auto row = [&](const char* k, const std::string& val) {
    t.cell(k).cell(val);
    t.end_row();
    c.report[k] = val;
  };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  row("symmetric", flag(v.symmetric));
  row("all_positive", flag(v.all_positive));
  row("positive_definite", flag(v.positive_definite));
  row("w_offdiag_nonpositive", flag(v.w_offdiag_nonpositive));
  row("min_eigenvalue", fmt17(v.min_eigenvalue));
  row("max_eigenvalue", fmt17(v.max_eigenvalue));
  row("max_offdiag_w", fmt17(v.max_offdiag_w));
  row("ok_for_sampling", flag(v.ok_for_sampling()));
  row("ok_for_schafer_wegner", flag(v.ok_for_schafer_wegner()));
  c.csv("validate_cov.csv", t);
  c.log << v.summary() << "\n";
  return v.ok_for_sampling() ? kExitOk : kExitInconsistent;
}

int op_g1(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const std::size_t site = c.site("params.site");
  CsvTable t({"site", "re_z", "im_z", "re_val", "im_val", "se_re", "se_im", "n", "seed"});
  for (cd z : c.cfg.complex_list("params.z")) {
    const GreensEstimate e = estimate_g1(spec, site, z, c.mc());
    t.cell(static_cast<std::uint64_t>(site)).cell(z.real()).cell(z.imag());
    t.cell(e.value.real()).cell(e.value.imag()).cell(e.se_re).cell(e.se_im).cell(e.num_samples).cell(e.seed);
    t.end_row();
  }
  c.csv("g1.csv", t);
  return kExitOk;
}

std::pair<cd, cd> two_z(const Context& c) {
  const auto z = c.cfg.complex_list("params.z");
  if (z.size() != 2) throw ConfigError("key 'params.z' must hold exactly two values for this op");
  return {z[0], z[1]};
}

int op_g2(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const auto [z1, z2] = two_z(c);
  const std::size_t i = c.site("params.site"), j = c.site("params.site2");
  const GreensEstimate e = estimate_g2(spec, i, j, z1, z2, c.mc());
  CsvTable t({"i", "j", "re_z1", "im_z1", "re_z2", "im_z2", "re_val", "im_val", "se_re", "se_im", "n", "seed"});
  t.cell(static_cast<std::uint64_t>(i)).cell(static_cast<std::uint64_t>(j));
  t.cell(z1.real()).cell(z1.imag()).cell(z2.real()).cell(z2.imag());
  t.cell(e.value.real()).cell(e.value.imag()).cell(e.se_re).cell(e.se_im).cell(e.num_samples).cell(e.seed);
  t.end_row();
  c.csv("g2.csv", t);
  return kExitOk;
}

int op_dos(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const int points = c.positive("params.dos_points");
  const double lo = c.cfg.real("params.dos_e_min"), hi = c.cfg.real("params.dos_e_max");
  if (!(hi > lo) && points > 1) throw ConfigError("key 'params.dos_e_max' must exceed params.dos_e_min");
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(points == 1 ? lo : lo + (hi - lo) * k / (points - 1));
  const auto dos = dos_profile(spec, c.site("params.site"), grid, c.cfg.real("params.dos_epsilon"), c.mc());
  CsvTable t({"E", "rho", "se"});
  for (const DosPoint& p : dos) {
    t.cell(p.E).cell(p.rho).cell(p.se);
    t.end_row();
  }
  c.csv("dos.csv", t);
  return kExitOk;
}

int op_lyapunov(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const std::size_t i = c.site("params.site");
  if (i >= spec.num_sites()) throw ConfigError("key 'params.site' out of range");
  const double E = c.cfg.real("params.energy"), eps = c.cfg.real("params.transport_epsilon");
  if (!(eps > 0.0)) throw ConfigError("key 'params.transport_epsilon' must be positive");
  std::vector<std::size_t> js;
  for (std::size_t j = 0; j < spec.num_sites(); ++j) js.push_back(j);
  const auto g2 = g2_profile(spec, i, js, cd(E, eps), cd(E, -eps), c.mc());
  std::map<double, std::vector<double>> by_distance;
  for (std::size_t k = 0; k < js.size(); ++k)
    by_distance[spec.lattice.distance(i, js[k])].push_back(std::abs(g2[k].value));
  // sites at equal distance are averaged
  std::vector<std::pair<double, double>> values;
  for (const auto& [d, v] : by_distance) {
    double s = 0.0;
    for (double x : v) s += x;
    values.emplace_back(d, s / v.size());
  }
  const LyapunovFit fit = lyapunov_fit(values, {c.cfg.real("params.fit_min"), c.cfg.real("params.fit_max")});
  CsvTable t({"distance", "log_abs_g2", "fit_lambda", "r2"});
  for (const auto& [d, v] : values) {
    t.cell(d).cell(std::log(v)).cell(fit.lambda).cell(fit.r_squared);
    t.end_row();
  }
  c.csv("lyapunov.csv", t);
  c.report["fit_lambda"] = fit.lambda;
  c.report["intercept"] = fit.intercept;
  c.report["r2"] = fit.r_squared;
  c.report["fit_points"] = fit.num_points;
  c.log << "lyapunov: lambda = " << fit.lambda << ", r2 = " << fit.r_squared << "\n";
  return kExitOk;
}

int op_spacings(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const SpacingStats s = spacing_stats(spec, c.cfg.integer("params.num_samples"), c.positive("params.window"),
                                       c.cfg.seed(), c.workers, c.positive("params.bins"), c.cfg.real("params.s_max"));
  CsvTable t({"s", "count"});
  for (std::size_t k = 0; k < s.counts.size(); ++k) {
    t.cell(0.5 * (s.bin_edges[k] + s.bin_edges[k + 1])).cell(s.counts[k]);
    t.end_row();
  }
  c.csv("spacings.csv", t);
  c.report["num_spacings"] = s.num_spacings;
  c.report["ks_wigner"] = s.ks_wigner;
  c.log << "spacings: KS to Wigner = " << s.ks_wigner << "\n";
  return kExitOk;
}

int op_duality(Context& c, const std::string& op) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const SignatureSpec sig = c.sig();
  DualityReport r;
  if (op == "verify-fermionic") {
    r = verify_fermionic(spec, sig, c.mc());
  } else if (op == "verify-bosonic") {
    r = verify_bosonic_same_half(spec, sig, c.mc());
  } else if (op == "falsify-naive") {
    r = falsify_naive(spec, sig, c.mc());
  } else {
    FyodorovConfig fc;
    fc.m_nodes = c.positive("params.m_nodes");
    fc.angle_nodes = c.positive("params.angle_nodes");
    fc.tail = c.cfg.real("params.fyodorov_tail");
    fc.force_sampling = c.cfg.boolean("params.force_sampling");
    r = verify_fyodorov(spec, sig, c.mc(), fc);
  }
  const int code = emit_duality(c, spec, sig, r);
  if (op != "falsify-naive") return code;
  // the naive formula is expected to fail here
  if (code == kExitInconsistent) return kExitOk;
  if (code == kExitOk) return kExitInconsistent;
  return code;
}

int op_verify_sw(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const double lam = c.lambda(spec);
  const SwResult r = verify_schafer_wegner(spec, c.sig(), lam, c.quad(), c.mc());
  const F2BoundCheck f2 = check_f2_bound(spec, lam, c.cfg.integer("params.f2_points"), mix_seed(c.cfg.seed(), 2));
  int code = emit_duality(c, spec, c.sig(), r.report);
  c.report["lambda"] = lam;
  c.report["rhs_delta"] = r.rhs.delta;
  c.report["normalization"] = complex_json(r.normalization.value);
  c.report["normalization_delta"] = r.normalization.delta;
  c.report["tail"] = r.tail;
  c.report["r_max"] = r.domain.r_max;
  c.report["p_max"] = r.domain.p_max;
  c.report["f2_points"] = f2.points;
  c.report["f2_violations"] = f2.violations;
  c.report["f2_bound"] = f2.bound;
  c.report["f2_min"] = f2.min_f2;
  const bool norm_ok = std::abs(r.normalization.value - 1.0) < 0.01;
  c.report["normalization_ok"] = norm_ok;
  if (code == kExitOk && (!norm_ok || f2.violations > 0)) code = kExitInconsistent;
  return code;
}

MatC projector_from_seed(std::uint64_t seed, int n) {
  Stream st(seed, 0, 7);
  VecC phi(n);
  for (int a = 0; a < n; ++a) phi(a) = st.complex_normal(1.0);
  phi /= phi.norm();
  return phi.conjugate() * phi.transpose();
}

int op_shift(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const SignatureSpec sig = c.sig();
  const double lam = c.lambda(spec);
  const MatC M = projector_from_seed(c.cfg.seed(), sig.n());
  const ShiftResult r = shift_invariance(spec, sig, lam, c.cfg.real_list("params.t_grid"), M, c.quad());
  CsvTable t({"t", "re", "im", "se", "usable"});
  for (const ShiftPoint& p : r.points) {
    t.cell(p.t).cell(p.value.real()).cell(p.value.imag()).cell(p.se).cell(p.usable ? "true" : "false");
    t.end_row();
  }
  c.csv("shift.csv", t);
  c.report["lambda"] = lam;
  c.report["exact"] = complex_json(r.exact);
  c.report["max_pairwise_z"] = r.max_pairwise_z;
  c.report["largest_usable_t"] = r.largest_usable_t;
  const Verdict v = verdict_for(r.max_pairwise_z);
  c.report["verdict"] = to_string(v);
  c.log << "shift-invariance: max pairwise z = " << r.max_pairwise_z << "\n";
  return verdict_exit(v);
}

int op_susy(Context& c) {
  const EnsembleSpec spec = c.cfg.ensemble();
  const SignatureSpec sig = c.sig();
  const double lam = c.lambda(spec);
  const SusyResult r = verify_susy_g2(spec, sig, lam, c.quad(), c.mc());
  int code = emit_duality(c, spec, sig, r.report);
  c.report["lambda"] = lam;
  c.report["normalization"] = complex_json(r.normalization.value);
  c.report["normalization_delta"] = r.normalization.delta;
  c.report["derivative"] = complex_json(r.derivative.value);
  c.report["derivative_delta"] = r.derivative.delta;
  c.report["tail"] = r.tail;
  const bool norm_ok = std::abs(r.normalization.value - 1.0) < 0.01;
  c.report["normalization_ok"] = norm_ok;
  if (code == kExitOk && !norm_ok) code = kExitInconsistent;
  return code;
}

ManifoldPoint random_point(Branch b, Stream& st) {
  if (b == Branch::hyperbolic_bb) return {b, 2.0 * st.normal(), 2 * M_PI * st.uniform()};
  return {b, M_PI * st.uniform(), 2 * M_PI * st.uniform()};
}

MatC s_bb() {
  MatC s = MatC::Identity(2, 2);
  s(1, 1) = -1.0;
  return s;
}

int op_saddle(Context& c) {
  const int points = c.positive("params.num_points");
  Stream st(c.cfg.seed(), 0, 11);
  CsvTable t({"branch", "theta", "phi", "residual"});
  double worst = 0.0;
  auto row = [&](const ManifoldPoint& p) {
    const MatC q = manifold_point(p);
    const double r = p.branch == Branch::hyperbolic_bb ? sector_residual(q, s_bb())
                                                       : sector_residual(q, MatC::Identity(2, 2));
    worst = std::max(worst, r / (1.0 + q.squaredNorm()));
    t.cell(to_string(p.branch)).cell(p.theta).cell(p.phi).cell(r);
    t.end_row();
  };
  for (int k = 0; k < points; ++k) {
    row(random_point(Branch::hyperbolic_bb, st));
    row(random_point(Branch::sphere_ff, st));
  }
  row({Branch::plus_one_ff, 0, 0});
  row({Branch::minus_one_ff, 0, 0});
  c.csv("saddle_report.csv", t);
  c.report["max_scaled_residual"] = worst;
  const EnsembleSpec spec = c.cfg.ensemble();
  try {
    const ConstantSaddle cs = constant_saddle(make_saddle_config(spec.w(), spec.orbitals));
    c.report["lambda"] = cs.lambda;
    c.report["lambda_residual"] = cs.residual;
  } catch (const Refusal& e) {
    c.report["constant_saddle"] = e.what();
  }
  c.log << "saddle: max residual " << worst << "\n";
  return worst < 1e-12 ? kExitOk : kExitInconsistent;
}

int op_fiber(Context& c) {
  const int points = c.positive("params.num_points");
  Stream st(c.cfg.seed(), 0, 13);
  CsvTable t({"theta_bb", "phi_bb", "theta_ff", "phi_ff", "dimension"});
  bool all_four = true;
  for (int k = 0; k < points; ++k) {
    const ManifoldPoint bb = random_point(Branch::hyperbolic_bb, st);
    const ManifoldPoint ff = random_point(Branch::sphere_ff, st);
    const int d = fiber_dimension(manifold_point(bb), manifold_point(ff));
    all_four = all_four && d == 4;
    t.cell(bb.theta).cell(bb.phi).cell(ff.theta).cell(ff.phi).cell(d);
    t.end_row();
  }
  c.csv("fiber.csv", t);
  const MatC one = MatC::Identity(2, 2);
  c.report["dimension_plus_one_ff"] = fiber_dimension(one, one);
  c.report["dimension_minus_one_ff"] = fiber_dimension(one, -one);
  c.report["null_threshold"] = kNullThreshold;
  c.report["all_four"] = all_four;
  return all_four ? kExitOk : kExitInconsistent;
}

int op_gue_moment(Context& c) {
  std::vector<std::int64_t> Ns = c.cfg.int_list("params.N_values");
  if (Ns.empty()) Ns.push_back(c.cfg.ensemble().orbitals);
  const int n = c.positive("params.n");
  const double E = c.cfg.real("params.energy");
  const double lam = c.cfg.real("params.lambda") == 0.0 ? 1.0 : c.cfg.real("params.lambda");
  GueMomentQuad qc;
  qc.nodes = static_cast<int>(c.cfg.integer("params.quad_nodes"));
  CsvTable t({"N", "n", "E", "mc_re", "mc_im", "se_re", "se_im", "quad_re", "quad_im", "quad_delta", "saddle_re",
              "saddle_im", "ratio_re", "ratio_im", "z"});
  double worst = 0.0;
  for (std::int64_t N : Ns) {
    const GueMoment g = gue_det_moment(static_cast<int>(N), n, E, lam, c.mc(), qc);
    GreensEstimate q;
    q.value = g.quadrature;
    const double z = z_score(g.mc, q);
    worst = std::max(worst, z);
    t.cell(N).cell(n).cell(E).cell(g.mc.value.real()).cell(g.mc.value.imag()).cell(g.mc.se_re).cell(g.mc.se_im);
    t.cell(g.quadrature.real()).cell(g.quadrature.imag()).cell(g.quad_delta);
    t.cell(g.saddle.real()).cell(g.saddle.imag()).cell(g.ratio.real()).cell(g.ratio.imag()).cell(z);
    t.end_row();
  }
  c.csv("gue_moment.csv", t);
  c.report["lambda"] = lam;
  c.report["max_z"] = worst;
  const Verdict v = verdict_for(worst);
  c.report["verdict"] = to_string(v);
  return verdict_exit(v);
}

using OpFn = std::function<int(Context&)>;

const std::vector<std::pair<std::string, OpFn>>& op_table() {
  static const std::vector<std::pair<std::string, OpFn>> t = {
      {"sample", op_sample},
      {"validate-cov", op_validate_cov},
      {"g1", op_g1},
      {"g2", op_g2},
      {"dos", op_dos},
      {"lyapunov", op_lyapunov},
      {"spacings", op_spacings},
      {"verify-fermionic", [](Context& c) { return op_duality(c, "verify-fermionic"); }},
      {"verify-bosonic", [](Context& c) { return op_duality(c, "verify-bosonic"); }},
      {"verify-fyodorov", [](Context& c) { return op_duality(c, "verify-fyodorov"); }},
      {"verify-sw", op_verify_sw},
      {"falsify-naive", [](Context& c) { return op_duality(c, "falsify-naive"); }},
      {"shift-invariance", op_shift},
      {"verify-susy-g2", op_susy},
      {"saddle", op_saddle},
      {"fiber", op_fiber},
      {"gue-moment", op_gue_moment},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : op_table()) v.push_back(k);
    return v;
  }();
  return names;
}

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log) {
  const std::string& op = cfg.op();
  const OpFn* fn = nullptr;
  for (const auto& [k, f] : op_table())
    if (k == op) fn = &f;
  if (!fn) throw ConfigError("unknown op '" + op + "'");
  std::filesystem::create_directories(out_dir);
  Context c{cfg, out_dir, workers, log, cfg.hash_hex(), json::object()};
  c.report["op"] = op;
  c.report["config_hash"] = c.hash;
  c.report["seed"] = cfg.seed();
  write_text((c.dir / "config.resolved").string(), "# config_hash: " + c.hash + "\n" + cfg.resolved());
  const int code = (*fn)(c);
  c.report["exit_code"] = code;
  write_text((c.dir / "report.json").string(), c.report.dump(2) + "\n");
  return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"susylab: random-matrix duality experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::vector<std::string> sets;
  for (const std::string& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " op");
    sub->add_option("--config", config_path, "YAML config")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--workers", workers, "worker threads (0: all cores)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", sets, "key=value override, repeatable");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  const std::string op = app.get_subcommands().front()->get_name();
  try {
    std::vector<std::string> overrides = sets;
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) overrides.push_back("seed=" + std::to_string(seed));
    if (sub->count("--out")) overrides.push_back("output_dir=\"" + out_dir + "\"");
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path, overrides);
    const std::string cfg_op = cfg.text("op");
    if (!cfg_op.empty() && cfg_op != op) err << "note: subcommand '" << op << "' replaces config op '" << cfg_op << "'\n";
    cfg.set("op", op, "subcommand");
    const int code = run_experiment(cfg, cfg.output_dir(), workers, out);
    out << "exit " << code << "\n";
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace susylab
