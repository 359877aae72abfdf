#include "susylab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "susylab/hash.hpp"

namespace susylab {

const std::vector<KeySpec>& config_schema() {
  using K = ValueKind;
  static const std::vector<KeySpec> s = {
      {"op", K::text, "\"\"", "subcommand name"},
      {"seed", K::unsigned_integer, "0", "64-bit experiment seed"},
      {"output_dir", K::text, "out", "directory for CSV, report.json and config.resolved"},
      {"ensemble.lattice.num_sites", K::integer, "", "sites of the open chain"},
      {"ensemble.orbitals", K::integer, "1", "orbitals per site (N)"},
      {"ensemble.covariance.profile", K::text, "gue", "gue | gaussian_band | exponential_band | explicit"},
      {"ensemble.covariance.scale", K::real, "1", "overall factor of J"},
      {"ensemble.covariance.width", K::real, "1", "band width W"},
      {"ensemble.covariance.matrix", K::real_list, "[]", "row-major J for the explicit profile"},
      {"params.num_samples", K::integer, "100000", "Monte Carlo draws per side"},
      {"params.z", K::complex_list, "[[0, 1]]", "spectral parameters as [re, im] pairs"},
      {"params.site", K::integer, "0", "site i"},
      {"params.site2", K::integer, "0", "site j"},
      {"params.energy", K::real, "0", "energy E (lyapunov, gue-moment)"},
      {"params.count", K::integer, "1", "matrices written by sample"},
      {"params.dos_epsilon", K::real, "0.1", "DOS smoothing"},
      {"params.dos_e_min", K::real, "-3", "DOS grid start"},
      {"params.dos_e_max", K::real, "3", "DOS grid end"},
      {"params.dos_points", K::integer, "61", "DOS grid points"},
      {"params.transport_epsilon", K::real, "0.01", "epsilon of the two-point probe"},
      {"params.fit_min", K::real, "2", "smallest distance in the Lyapunov fit"},
      {"params.fit_max", K::real, "20", "largest distance in the Lyapunov fit"},
      {"params.window", K::integer, "15", "unfolding window (levels)"},
      {"params.bins", K::integer, "40", "spacing histogram bins"},
      {"params.s_max", K::real, "4", "spacing histogram range"},
      {"params.lambda", K::real, "0", "Schafer-Wegner lambda; 0 selects sqrt(N / sum_j w_0j)"},
      {"params.r_nodes", K::integer, "96", "boost Gauss-Legendre nodes"},
      {"params.r_tail", K::real, "36", "decay exponent at the boost cutoff"},
      {"params.p_tail", K::real, "40", "Gaussian exponent at the Im Q cutoff"},
      {"params.h_factor", K::real, "1", "trapezoid step factor"},
      {"params.chi_nodes", K::integer, "32", "angle nodes (shift-invariance)"},
      {"params.gh_nodes", K::integer, "8", "Gauss-Hermite nodes (shift-invariance)"},
      {"params.f2_points", K::integer, "10000", "domain points for the f2 bound check (verify-sw)"},
      {"params.t_grid", K::real_list, "[0, 0.25, 0.5, 0.75]", "domain shifts"},
      {"params.m_nodes", K::integer, "48", "Fyodorov eigenvalue nodes"},
      {"params.angle_nodes", K::integer, "24", "Fyodorov angle nodes (n = 2)"},
      {"params.fyodorov_tail", K::real, "40", "Fyodorov truncation exponent"},
      {"params.force_sampling", K::boolean, "false", "Fyodorov RHS by Wishart sampling"},
      {"params.num_points", K::integer, "100", "random manifold points (saddle, fiber)"},
      {"params.n", K::integer, "1", "determinant power (gue-moment)"},
      {"params.N_values", K::int_list, "[]", "matrix sizes (gue-moment); empty uses ensemble.orbitals"},
      {"params.quad_nodes", K::integer, "0", "Gauss-Hermite nodes (gue-moment); 0 is exact"},
  };
  return s;
}

namespace {

const std::set<std::string>& sections() {
  static const std::set<std::string> s = {"ensemble", "ensemble.lattice", "ensemble.covariance", "params"};
  return s;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_schema())
    if (k.key == key) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double strict_double(const std::string& t) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + t + "'");
  }
  if (pos != t.size()) throw ConfigError("not a number: '" + t + "'");
  return v;
}

std::int64_t strict_int(const std::string& t) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + t + "'");
  }
  if (pos != t.size()) throw ConfigError("not an integer: '" + t + "'");
  return v;
}

std::string where(const YAML::Node& n, const std::string& origin) {
  if (origin != "file") return " (" + origin + ")";
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? " at line " + std::to_string(m.line + 1) : "";
}

std::string quote(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o + "\"";
}

std::string join(const std::vector<std::string>& v) {
  std::string o = "[";
  for (std::size_t k = 0; k < v.size(); ++k) o += (k ? ", " : "") + v[k];
  return o + "]";
}

}  // namespace

Real parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty number");
  const auto slash = t.find('/');
  Real r;
  r.text = t;
  if (slash == std::string::npos) {
    r.value = strict_double(t);
  } else {
    const double p = strict_double(trim(t.substr(0, slash)));
    const double q = strict_double(trim(t.substr(slash + 1)));
    if (q == 0.0) throw ConfigError("zero denominator in '" + t + "'");
    r.value = p / q;
  }
  if (!std::isfinite(r.value)) throw ConfigError("non-finite number '" + t + "'");
  return r;
}

std::string shortest_repr(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

struct Converted {
  std::string canonical;
  std::vector<Real> reals;
  std::vector<std::int64_t> ints;
  std::uint64_t u = 0;
  bool b = false;
  std::string s;
};

Converted convert(const YAML::Node& n, ValueKind kind, const std::string& key, const std::string& origin) {
  const std::string at = where(n, origin);
  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError("key '" + key + "'" + at + ": " + what);
  };
  auto scalar = [&](const YAML::Node& x) {
    if (!x.IsScalar()) throw fail("expected a scalar");
    return x.Scalar();
  };
  Converted c;
  try {
    switch (kind) {
      case ValueKind::integer: {
        const std::int64_t v = strict_int(trim(scalar(n)));
        c.ints = {v};
        c.canonical = std::to_string(v);
        break;
      }
      case ValueKind::unsigned_integer: {
        const std::string t = trim(scalar(n));
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
          throw fail("expected an unsigned integer, got '" + t + "'");
        try {
          c.u = std::stoull(t);
        } catch (const std::exception&) {
          throw fail("out of range: '" + t + "'");
        }
        c.canonical = std::to_string(c.u);
        break;
      }
      case ValueKind::real: {
        c.reals = {parse_real(scalar(n))};
        c.canonical = c.reals[0].text;
        break;
      }
      case ValueKind::boolean: {
        const std::string t = trim(scalar(n));
        if (t != "true" && t != "false") throw fail("expected true or false, got '" + t + "'");
        c.b = t == "true";
        c.canonical = t;
        break;
      }
      case ValueKind::text: {
        c.s = scalar(n);
        c.canonical = quote(c.s);
        break;
      }
      case ValueKind::real_list:
      case ValueKind::int_list: {
        if (!n.IsSequence()) throw fail("expected a list");
        std::vector<std::string> parts;
        for (const auto& x : n) {
          if (kind == ValueKind::real_list) {
            c.reals.push_back(parse_real(scalar(x)));
            parts.push_back(c.reals.back().text);
          } else {
            c.ints.push_back(strict_int(trim(scalar(x))));
            parts.push_back(std::to_string(c.ints.back()));
          }
        }
        c.canonical = join(parts);
        break;
      }
      case ValueKind::complex_list: {
        if (!n.IsSequence()) throw fail("expected a list of [re, im] pairs");
        std::vector<std::string> parts;
        for (const auto& x : n) {
          if (!x.IsSequence() || x.size() != 2) throw fail("expected [re, im] pairs");
          const Real re = parse_real(scalar(x[0])), im = parse_real(scalar(x[1]));
          c.reals.push_back(re);
          c.reals.push_back(im);
          parts.push_back("[" + re.text + ", " + im.text + "]");
        }
        c.canonical = join(parts);
        break;
      }
    }
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    if (m.rfind("key '", 0) == 0) throw;
    throw fail(m);
  }
  return c;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& yaml_value, const std::string& origin) {
  const KeySpec* spec = find_key(key);
  if (!spec) {
    if (sections().count(key)) throw ConfigError("'" + key + "' is a section, set its keys individually");
    throw ConfigError("unknown key '" + key + "' (" + origin + ")");
  }
  YAML::Node n;
  try {
    n = YAML::Load(yaml_value.empty() ? "\"\"" : yaml_value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("key '" + key + "' (" + origin + "): cannot parse value '" + yaml_value + "'");
  }
  const Converted c = convert(n, spec->kind, key, origin);
  values_[key] = Entry{spec->kind, c.canonical, c.reals, c.ints, c.u, c.b, c.s};
  if (key.rfind("ensemble.", 0) == 0) has_ensemble_ = true;
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text, const std::vector<std::string>& overrides,
                                               const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ": parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");

  // walk the tree; every leaf must be a schema key
  std::vector<std::pair<std::string, YAML::Node>> stack{{"", root}};
  while (!stack.empty()) {
    auto [prefix, node] = stack.back();
    stack.pop_back();
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string k = it->first.as<std::string>();
      const std::string path = prefix.empty() ? k : prefix + "." + k;
      const YAML::Node v = it->second;
      if (sections().count(path)) {
        if (path == "ensemble") cfg.has_ensemble_ = true;
        if (v.IsNull()) continue;
        if (!v.IsMap())
          throw ConfigError("section '" + path + "'" + where(it->first, "file") + " must be a mapping");
        stack.emplace_back(path, v);
        continue;
      }
      const KeySpec* spec = find_key(path);
      if (!spec) throw ConfigError("unknown key '" + path + "'" + where(it->first, "file"));
      const Converted c = convert(v, spec->kind, path, "file");
      cfg.values_[path] = Entry{spec->kind, c.canonical, c.reals, c.ints, c.u, c.b, c.s};
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' must look like key=value");
    cfg.set(trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  cfg.finalize();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), overrides, path);
}

void ExperimentConfig::finalize() {
  if (!has_ensemble_) throw ConfigError("missing required section 'ensemble'");
  for (const auto& k : config_schema()) {
    if (values_.count(k.key)) continue;
    if (k.default_value.empty()) throw ConfigError("missing required key '" + k.key + "'");
    const Converted c = convert(YAML::Load(k.default_value), k.kind, k.key, "default");
    values_[k.key] = Entry{k.kind, c.canonical, c.reals, c.ints, c.u, c.b, c.s};
  }
}

const ExperimentConfig::Entry& ExperimentConfig::entry(const std::string& key, ValueKind kind) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("key '" + key + "' is not set");
  if (it->second.kind != kind) throw ConfigError("key '" + key + "' has a different type");
  return it->second;
}

const std::string& ExperimentConfig::op() const {
  const std::string& s = entry("op", ValueKind::text).s;
  if (s.empty()) throw ConfigError("missing required key 'op'");
  return s;
}
std::uint64_t ExperimentConfig::seed() const { return entry("seed", ValueKind::unsigned_integer).u; }
std::string ExperimentConfig::output_dir() const { return entry("output_dir", ValueKind::text).s; }
std::int64_t ExperimentConfig::integer(const std::string& key) const {
  return entry(key, ValueKind::integer).ints.at(0);
}
std::uint64_t ExperimentConfig::unsigned_integer(const std::string& key) const {
  return entry(key, ValueKind::unsigned_integer).u;
}
double ExperimentConfig::real(const std::string& key) const { return entry(key, ValueKind::real).reals.at(0).value; }
bool ExperimentConfig::boolean(const std::string& key) const { return entry(key, ValueKind::boolean).b; }
std::string ExperimentConfig::text(const std::string& key) const { return entry(key, ValueKind::text).s; }
std::vector<double> ExperimentConfig::real_list(const std::string& key) const {
  std::vector<double> v;
  for (const Real& r : entry(key, ValueKind::real_list).reals) v.push_back(r.value);
  return v;
}
std::vector<std::int64_t> ExperimentConfig::int_list(const std::string& key) const {
  return entry(key, ValueKind::int_list).ints;
}
std::vector<std::complex<double>> ExperimentConfig::complex_list(const std::string& key) const {
  const auto& r = entry(key, ValueKind::complex_list).reals;
  std::vector<std::complex<double>> v;
  for (std::size_t k = 0; k + 1 < r.size(); k += 2) v.emplace_back(r[k].value, r[k + 1].value);
  return v;
}

EnsembleSpec ExperimentConfig::ensemble() const {
  const std::int64_t L = integer("ensemble.lattice.num_sites");
  const std::int64_t N = integer("ensemble.orbitals");
  if (L < 1) throw ConfigError("key 'ensemble.lattice.num_sites' must be >= 1");
  if (N < 1) throw ConfigError("key 'ensemble.orbitals' must be >= 1");
  const std::string profile = text("ensemble.covariance.profile");
  const double scale = real("ensemble.covariance.scale");
  const double width = real("ensemble.covariance.width");
  if (!(scale > 0.0)) throw ConfigError("key 'ensemble.covariance.scale' must be positive");
  EnsembleSpec spec;
  spec.lattice = LatticeSpec::chain(static_cast<std::size_t>(L));
  spec.orbitals = static_cast<int>(N);
  if (profile == "gue") {
    if (L != 1) throw ConfigError("profile 'gue' needs ensemble.lattice.num_sites = 1");
    spec.covariance = covariance_from_matrix(MatR::Constant(1, 1, scale));
  } else if (profile == "gaussian_band" || profile == "exponential_band") {
    if (!(width > 0.0)) throw ConfigError("key 'ensemble.covariance.width' must be positive");
    const bool gauss = profile == "gaussian_band";
    spec.covariance = build_covariance(
        spec.lattice, [=](double r) { return gauss ? std::exp(-r * r / (width * width)) : std::exp(-r / width); },
        scale);
  } else if (profile == "explicit") {
    const std::vector<double> m = real_list("ensemble.covariance.matrix");
    if (static_cast<std::int64_t>(m.size()) != L * L)
      throw ConfigError("key 'ensemble.covariance.matrix' needs num_sites^2 = " + std::to_string(L * L) +
                        " entries, got " + std::to_string(m.size()));
    MatR J(L, L);
    for (std::int64_t i = 0; i < L; ++i)
      for (std::int64_t j = 0; j < L; ++j) J(i, j) = scale * m[i * L + j];
    spec.covariance = covariance_from_matrix(J);
  } else {
    throw ConfigError("key 'ensemble.covariance.profile': unknown profile '" + profile + "'");
  }
  return spec;
}

std::string ExperimentConfig::render(bool with_output_dir) const {
  std::ostringstream o;
  std::vector<std::string> open;  // current section path
  for (const auto& k : config_schema()) {
    if (!with_output_dir && k.key == "output_dir") continue;
    std::vector<std::string> parts;
    std::stringstream ks(k.key);
    for (std::string p; std::getline(ks, p, '.');) parts.push_back(p);
    const std::vector<std::string> path(parts.begin(), parts.end() - 1);
    std::size_t common = 0;
    while (common < open.size() && common < path.size() && open[common] == path[common]) ++common;
    open.resize(common);
    for (std::size_t d = common; d < path.size(); ++d) {
      o << std::string(2 * d, ' ') << path[d] << ":\n";
      open.push_back(path[d]);
    }
    o << std::string(2 * path.size(), ' ') << parts.back() << ": " << values_.at(k.key).canonical << "\n";
  }
  return o.str();
}

std::string ExperimentConfig::resolved() const { return render(true); }

std::uint64_t ExperimentConfig::hash() const {
  Fnv1a h;
  h.text(render(false));
  return h.digest();
}

std::string ExperimentConfig::hash_hex() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace susylab
