#include "calr_lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace calr_lab {

using nlohmann::json;

namespace {

std::string describe(const std::string& field, const std::string& message, std::optional<int> line) {
  std::ostringstream os;
  if (line) os << "line " << *line << ": ";
  if (!field.empty()) os << "field '" << field << "': ";
  os << message;
  return os.str();
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object with the dotted path kept for messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError(path_, "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [key, value] : j_.items()) {
      if (!ok.count(key)) throw ScenarioError(join(path_, key), "unknown field");
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  [[nodiscard]] const json& get(const std::string& key) const {
    if (!j_.contains(key)) throw ScenarioError(join(path_, key), "missing required field");
    return j_.at(key);
  }

  [[nodiscard]] Node child(const std::string& key) const { return {get(key), join(path_, key)}; }

  [[nodiscard]] std::string str(const std::string& key) const {
    const json& v = get(key);
    if (!v.is_string()) throw ScenarioError(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  [[nodiscard]] double num(const std::string& key) const {
    const json& v = get(key);
    if (!v.is_number()) throw ScenarioError(join(path_, key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ScenarioError(join(path_, key), "must be finite");
    return x;
  }

  [[nodiscard]] double num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

  [[nodiscard]] double positive(const std::string& key) const {
    const double x = num(key);
    if (!(x > 0.0)) throw ScenarioError(join(path_, key), "must be positive");
    return x;
  }

  [[nodiscard]] int integer(const std::string& key) const {
    const json& v = get(key);
    if (!v.is_number_integer()) throw ScenarioError(join(path_, key), "expected an integer");
    return v.get<int>();
  }

  [[nodiscard]] int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  // a number, or [re, im]
  [[nodiscard]] calr::cdouble complex(const std::string& key) const {
    const json& v = get(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ScenarioError(join(path_, key), "expected a number or a [re, im] pair");
  }

  [[nodiscard]] calr::cdouble complex(const std::string& key, calr::cdouble fallback) const {
    return has(key) ? complex(key) : fallback;
  }

  template <typename E>
  E choice(const std::string& key, std::initializer_list<std::pair<const char*, E>> options) const {
    const std::string v = str(key);
    std::string names;
    for (const auto& [name, value] : options) {
      if (v == name) return value;
      names += names.empty() ? name : std::string(", ") + name;
    }
    throw ScenarioError(join(path_, key), "'" + v + "' is not one of " + names);
  }

  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

SourceDecl parse_source(const Node& n) {
  n.allow_only({"kind", "q", "rule", "k_max", "scale", "amplitude", "value", "k", "l", "coefficients"});
  SourceDecl s;
  s.kind = n.choice<calr::SourceKind>("kind", {{"Multipole", calr::SourceKind::Multipole},
                                               {"DeltaShell", calr::SourceKind::DeltaShell}});
  s.q = n.positive("q");
  s.rule = n.choice<CoefficientRule>("rule", {{"geometric", CoefficientRule::Geometric},
                                              {"constant", CoefficientRule::Constant},
                                              {"single", CoefficientRule::Single},
                                              {"explicit", CoefficientRule::Explicit}});
  s.k_max = n.integer("k_max", calr::kDefaultKMax);
  if (s.k_max < 1) throw ScenarioError(join(n.path(), "k_max"), "must be >= 1");
  switch (s.rule) {
    case CoefficientRule::Geometric:
      s.scale = n.positive("scale");
      s.amplitude = n.num("amplitude", 1.0);
      break;
    case CoefficientRule::Constant:
      s.value = n.complex("value", 1.0);
      break;
    case CoefficientRule::Single:
      s.single = {n.integer("k"), n.integer("l", 0)};
      if (!s.single.valid() || s.single.k < 1) throw ScenarioError(join(n.path(), "l"), "need k >= 1 and |l| <= k");
      if (s.single.k > s.k_max) throw ScenarioError(join(n.path(), "k"), "exceeds k_max");
      s.value = n.complex("value", 1.0);
      break;
    case CoefficientRule::Explicit: {
      const json& list = n.get("coefficients");
      const std::string path = join(n.path(), "coefficients");
      if (!list.is_array() || list.empty()) throw ScenarioError(path, "expected a non-empty array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const Node c(list[i], path + "[" + std::to_string(i) + "]");
        c.allow_only({"k", "l", "value"});
        ExplicitCoefficient e{{c.integer("k"), c.integer("l")}, c.complex("value")};
        if (!e.mode.valid() || e.mode.k < 1) throw ScenarioError(c.path(), "need k >= 1 and |l| <= k");
        if (e.mode.k > s.k_max) throw ScenarioError(join(c.path(), "k"), "exceeds k_max");
        s.coefficients.push_back(e);
      }
      break;
    }
  }
  return s;
}

EtaGridDecl parse_eta_grid(const Node& n) {
  n.allow_only({"rule", "start", "stop", "count", "j_first", "j_last", "base", "values"});
  EtaGridDecl g;
  g.rule = n.choice<EtaRule>("rule", {{"band_centered", EtaRule::BandCentered},
                                      {"geometric", EtaRule::Geometric},
                                      {"decades", EtaRule::Decades},
                                      {"list", EtaRule::List}});
  if (g.rule == EtaRule::BandCentered) {
    g.j_first = n.integer("j_first");
    g.j_last = n.integer("j_last");
    if (g.j_first < 1) throw ScenarioError(join(n.path(), "j_first"), "must be >= 1");
    if (g.j_last < g.j_first) throw ScenarioError(join(n.path(), "j_last"), "must be >= j_first");
    if (n.has("base")) {
      g.base = n.num("base");
      if (!(*g.base > 0.0 && *g.base < 1.0)) throw ScenarioError(join(n.path(), "base"), "must lie in (0, 1)");
    }
    return g;
  }
  if (g.rule == EtaRule::List) {
    const json& list = n.get("values");
    const std::string path = join(n.path(), "values");
    if (!list.is_array() || list.empty()) throw ScenarioError(path, "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string item = path + "[" + std::to_string(i) + "]";
      if (!list[i].is_number()) throw ScenarioError(item, "expected a number");
      const double eta = list[i].get<double>();
      if (!(eta >= 0.0) || !std::isfinite(eta)) throw ScenarioError(item, "must be finite and >= 0");
      if (!g.values.empty() && !(eta < g.values.back())) {
        throw ScenarioError(item, "the grid runs toward zero loss: values must decrease");
      }
      g.values.push_back(eta);
    }
    return g;
  }
  g.start = n.positive("start");
  g.stop = n.positive("stop");
  if (!(g.start > g.stop)) {
    throw ScenarioError(join(n.path(), "start"), "the grid runs toward zero loss: need start > stop");
  }
  if (g.rule == EtaRule::Geometric) {
    g.count = n.integer("count");
    if (g.count < 2) throw ScenarioError(join(n.path(), "count"), "must be >= 2");
  } else {
    const double a = std::log10(g.start);
    const double b = std::log10(g.stop);
    if (std::abs(a - std::round(a)) > 1e-9 || std::abs(b - std::round(b)) > 1e-9) {
      throw ScenarioError(join(n.path(), "start"), "decades need powers of ten for start and stop");
    }
  }
  return g;
}

}  // namespace

ScenarioError::ScenarioError(std::string field, const std::string& message, std::optional<int> line)
    : std::runtime_error(describe(field, message, line)), field_(std::move(field)), line_(line) {}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", e.what(), line_of(text, e.byte == 0 ? 0 : e.byte - 1));
  }

  const Node root(doc, "");
  root.allow_only({"name", "theorem", "expected_verdict", "description", "geometry", "materials", "loss_region",
                   "source", "eta_grid", "outputs", "probe_radius", "bounds"});
  Scenario s;
  s.document = doc;
  s.name = root.str("name");
  if (s.name.empty()) throw ScenarioError("name", "must not be empty");
  s.theorem = root.str("theorem", "");
  s.description = root.str("description", "");
  if (root.has("expected_verdict")) {
    s.expected_verdict = root.choice<calr::Verdict>("expected_verdict", {{"Blowup", calr::Verdict::Blowup},
                                                                         {"Bounded", calr::Verdict::Bounded},
                                                                         {"Inconclusive", calr::Verdict::Inconclusive}});
  }

  const Node geo = root.child("geometry");
  geo.allow_only({"r_i", "r_e"});
  s.r_i = geo.positive("r_i");
  s.r_e = geo.positive("r_e");
  if (!(s.r_e > s.r_i)) throw ScenarioError("geometry.r_e", "must exceed r_i");

  const Node mat = root.child("materials");
  mat.allow_only({"kind", "k0", "eps_core", "eps_shell", "eps_matrix"});
  s.materials = mat.choice<Materials>("kind", {{"Standard", Materials::Standard},
                                               {"Coreless", Materials::Coreless},
                                               {"AdaptiveShell", Materials::AdaptiveShell},
                                               {"FixedShell", Materials::FixedShell},
                                               {"Given", Materials::Given}});
  if (s.materials == Materials::Coreless || s.materials == Materials::FixedShell) {
    s.k0 = mat.integer("k0");
    if (s.k0 < 1) throw ScenarioError("materials.k0", "must be >= 1");
  }
  s.eps_core = mat.complex("eps_core", 1.0);
  s.eps_shell = mat.complex("eps_shell", 1.0);
  s.eps_matrix = mat.complex("eps_matrix", 1.0);

  s.loss_region = root.choice<calr::LossRegion>("loss_region", {{"Shell", calr::LossRegion::Shell},
                                                                {"WholeSpace", calr::LossRegion::WholeSpace}});
  s.source = parse_source(root.child("source"));
  s.eta_grid = parse_eta_grid(root.child("eta_grid"));

  const json& outs = root.get("outputs");
  if (!outs.is_array() || outs.empty()) throw ScenarioError("outputs", "expected a non-empty array");
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string field = "outputs[" + std::to_string(i) + "]";
    if (!outs[i].is_string()) throw ScenarioError(field, "expected a string");
    const std::string o = outs[i].get<std::string>();
    Output out{};
    if (o == "energy-sweep") {
      out = Output::EnergySweep;
    } else if (o == "bounds") {
      out = Output::Bounds;
    } else if (o == "field-profile") {
      out = Output::FieldProfile;
    } else if (o == "calr-diagnostic") {
      out = Output::CalrDiagnostic;
    } else {
      throw ScenarioError(field, "'" + o + "' is not one of energy-sweep, bounds, field-profile, calr-diagnostic");
    }
    if (std::find(s.outputs.begin(), s.outputs.end(), out) != s.outputs.end()) {
      throw ScenarioError(field, "duplicate output");
    }
    s.outputs.push_back(out);
  }

  if (root.has("probe_radius")) s.probe_radius = root.positive("probe_radius");

  if (root.has("bounds")) {
    const Node b = root.child("bounds");
    b.allow_only({"family", "lambda"});
    BoundsDecl d;
    d.family = b.choice<BoundsFamily>("family", {{"primal-nr1", BoundsFamily::PrimalNR1},
                                                 {"dual-r1", BoundsFamily::DualR1},
                                                 {"dual-r2", BoundsFamily::DualR2},
                                                 {"crc-fixed", BoundsFamily::CrcFixed},
                                                 {"crc-adaptive", BoundsFamily::CrcAdaptive}});
    if (b.has("lambda")) d.lambda = b.num("lambda");
    s.bounds = d;
  }
  const bool wants_bounds = std::find(s.outputs.begin(), s.outputs.end(), Output::Bounds) != s.outputs.end();
  if (wants_bounds && !s.bounds) throw ScenarioError("bounds", "the bounds output needs a bounds section");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot read scenario file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str());
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw calr::PreconditionError(what);
}

}  // namespace

void check_preconditions(const Scenario& s) {
  const calr::SweepTemplate tpl = sweep_template(s);
  tpl.base.validate();
  require(s.source.q > s.r_e, "source radius q must exceed r_e");
  if (s.probe_radius) {
    require(*s.probe_radius > s.r_e, "probe_radius must exceed r_e");
    require(*s.probe_radius != s.source.q, "probe_radius must differ from the source radius");
  }
  if (!s.bounds) return;

  const double q = s.source.q / s.r_i;
  const double re = s.r_e / s.r_i;
  const bool whole = s.loss_region == calr::LossRegion::WholeSpace;
  const auto family = to_string(s.bounds->family);
  require(whole, "bounds family " + family + " needs loss_region WholeSpace");
  require(build_source(s).is_real_valued(), "bounds need a real-valued source");
  switch (s.bounds->family) {
    case BoundsFamily::PrimalNR1:
      require(s.materials == Materials::Standard, "primal-nr1 needs Standard materials");
      break;
    case BoundsFamily::DualR1:
      require(s.materials == Materials::Coreless, "dual-r1 needs Coreless materials");
      break;
    case BoundsFamily::DualR2:
      require(s.materials == Materials::AdaptiveShell, "dual-r2 needs AdaptiveShell materials");
      require(q < std::pow(re, 1.5), "dual-r2 needs q < r_e^{3/2} in units of r_i");
      break;
    case BoundsFamily::CrcFixed:
      require(s.materials == Materials::FixedShell, "crc-fixed needs FixedShell materials");
      break;
    case BoundsFamily::CrcAdaptive:
      require(s.materials == Materials::AdaptiveShell, "crc-adaptive needs AdaptiveShell materials");
      require(q > std::sqrt(re * re * re), "crc-adaptive needs the source outside the critical radius");
      break;
  }
}

calr::SweepTemplate sweep_template(const Scenario& s) {
  calr::SweepTemplate t;
  t.base.r_i = s.r_i;
  t.base.r_e = s.r_e;
  t.base.loss_region = s.loss_region;
  t.base.eps_m = 1.0;
  switch (s.materials) {
    case Materials::Standard: t.materials = calr::MaterialKind::Standard; break;
    case Materials::Coreless: t.materials = calr::MaterialKind::Coreless; break;
    case Materials::AdaptiveShell:
    case Materials::FixedShell: t.materials = calr::MaterialKind::PlasmonicShell; break;
    case Materials::Given:
      t.materials = calr::MaterialKind::Given;
      t.base.eps_c = s.eps_core;
      t.base.eps_s = s.eps_shell;
      t.base.eps_m = s.eps_matrix;
      break;
  }
  return t;
}

calr::Coupling coupling(const Scenario& s) {
  if (s.materials == Materials::AdaptiveShell) {
    return calr::Coupling::adaptive(s.loss_region == calr::LossRegion::Shell ? calr::KRule::ShellRule
                                                                             : calr::KRule::WholeSpaceRule);
  }
  return calr::Coupling::fixed(s.k0);
}

calr::SourceSpectrum build_source(const Scenario& s) {
  const SourceDecl& d = s.source;
  switch (d.rule) {
    case CoefficientRule::Geometric:
      return calr::SourceSpectrum::zonal_geometric(d.kind, d.q, d.scale, d.k_max, d.amplitude);
    case CoefficientRule::Constant:
      return calr::SourceSpectrum::zonal_constant(d.kind, d.q, d.value, d.k_max);
    case CoefficientRule::Single:
      return calr::SourceSpectrum::single(d.kind, d.q, d.single, d.value, d.k_max);
    case CoefficientRule::Explicit: {
      calr::SourceSpectrum src(d.kind, d.q, d.k_max);
      for (const auto& c : d.coefficients) src.set(c.mode, c.value);
      return src;
    }
  }
  throw calr::DomainError("unknown coefficient rule");
}

std::vector<double> build_etas(const Scenario& s) {
  const EtaGridDecl& g = s.eta_grid;
  std::vector<double> etas;
  switch (g.rule) {
    case EtaRule::BandCentered: {
      // both coupling rules band eta by r_i / r_e (rho, or 1 / r_e in units of r_i)
      const double base = g.base.value_or(s.r_i / s.r_e);
      for (int j = g.j_first; j <= g.j_last; ++j) etas.push_back(std::pow(base, j - 0.5));
      break;
    }
    case EtaRule::Geometric: {
      const double ratio = std::log(g.stop / g.start) / (g.count - 1);
      for (int i = 0; i < g.count; ++i) etas.push_back(g.start * std::exp(ratio * i));
      etas.back() = g.stop;
      break;
    }
    case EtaRule::List:
      etas = g.values;
      break;
    case EtaRule::Decades: {
      const int a = static_cast<int>(std::lround(std::log10(g.start)));
      const int b = static_cast<int>(std::lround(std::log10(g.stop)));
      for (int e = a; e >= b; --e) etas.push_back(std::pow(10.0, e));
      break;
    }
  }
  return etas;
}

std::string to_string(Materials m) {
  switch (m) {
    case Materials::Standard: return "Standard";
    case Materials::Coreless: return "Coreless";
    case Materials::AdaptiveShell: return "AdaptiveShell";
    case Materials::FixedShell: return "FixedShell";
    case Materials::Given: return "Given";
  }
  return "?";
}

std::string to_string(Output o) {
  switch (o) {
    case Output::EnergySweep: return "energy-sweep";
    case Output::Bounds: return "bounds";
    case Output::FieldProfile: return "field-profile";
    case Output::CalrDiagnostic: return "calr-diagnostic";
  }
  return "?";
}

std::string to_string(BoundsFamily f) {
  switch (f) {
    case BoundsFamily::PrimalNR1: return "primal-nr1";
    case BoundsFamily::DualR1: return "dual-r1";
    case BoundsFamily::DualR2: return "dual-r2";
    case BoundsFamily::CrcFixed: return "crc-fixed";
    case BoundsFamily::CrcAdaptive: return "crc-adaptive";
  }
  return "?";
}

std::string output_file(Output o) {
  switch (o) {
    case Output::EnergySweep: return "energy_sweep.csv";
    case Output::Bounds: return "bounds.csv";
    case Output::FieldProfile: return "field_profile.csv";
    case Output::CalrDiagnostic: return "calr_diagnostic.csv";
  }
  return "out.csv";
}

}  // namespace calr_lab
