#include "calr_lab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace calr_lab {

using nlohmann::json;

namespace {

constexpr std::size_t kTopModes = 5;
constexpr int kProfilePoints = 64;
// ray used for the field profile, off the symmetry axis
constexpr double kProfileTheta = 1.0;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += field(cells[i]);
    }
    body_ += '\n';
  }

  [[nodiscard]] const std::string& str() const { return body_; }

 private:
  std::string body_;
};

std::string k_cell(const std::optional<int>& k) { return k ? std::to_string(*k) : ""; }

std::string status_cell(const std::string& status) { return status.empty() ? "ok" : status; }

int coupling_degree(const calr::Coupling& c, const calr::EnergyBreakdown& p) {
  return c.mode == calr::Coupling::Mode::Adaptive ? p.k_eta.value_or(1) : c.k0;
}

std::string energy_csv(const calr::EnergySweep& sweep) {
  Csv csv({"eta", "k_eta", "E", "tail_bound", "status", "mode_1", "E_mode_1", "mode_2", "E_mode_2", "mode_3",
           "E_mode_3", "mode_4", "E_mode_4", "mode_5", "E_mode_5", "fit_slope", "fit_residual", "verdict"});
  for (const auto& p : sweep.points) {
    std::vector<std::string> row{fmt(p.eta), k_cell(p.k_eta), fmt(p.total.real()), fmt(p.tail_bound),
                                 status_cell(p.status)};
    const auto top = calr::top_modes(p, kTopModes);
    for (std::size_t i = 0; i < kTopModes; ++i) {
      if (i < top.size()) {
        row.push_back(std::to_string(top[i].first));
        row.push_back(fmt(top[i].second.real()));
      } else {
        row.insert(row.end(), {"", ""});
      }
    }
    row.push_back(fmt(sweep.growth_fit.slope));
    row.push_back(fmt(sweep.growth_fit.residual));
    row.push_back(calr::to_string(sweep.verdict));
    csv.row(row);
  }
  return csv.str();
}

double part(const calr::BoundReport& r, const std::string& key) {
  const auto it = r.parts.find(key);
  return it == r.parts.end() ? 0.0 : it->second;
}

double diagnostic(const calr::BoundReport& r, const std::string& key) {
  const auto it = r.diagnostics.find(key);
  return it == r.diagnostics.end() ? std::nan("") : it->second;
}

calr::BoundReport evaluate_bound(const BoundsDecl& b, const calr::LayeredConfig& cfg,
                                 const calr::SourceSpectrum& src, int k0, double eta) {
  switch (b.family) {
    case BoundsFamily::PrimalNR1: return calr::primal_bound_nr1(cfg, src, eta);
    case BoundsFamily::DualR1: {
      if (b.lambda) return calr::dual_bound_r1(cfg, src, k0, *b.lambda);
      const double star = diagnostic(calr::dual_bound_r1(cfg, src, k0, 1.0), "lambda-star");
      return calr::dual_bound_r1(cfg, src, k0, star);
    }
    case BoundsFamily::DualR2: return calr::dual_bound_r2(cfg, src, eta, b.lambda);
    case BoundsFamily::CrcFixed: return calr::primal_bound_crc(cfg, src, eta, calr::CrcMode::FixedK0);
    case BoundsFamily::CrcAdaptive: return calr::primal_bound_crc(cfg, src, eta, calr::CrcMode::AdaptiveK);
  }
  throw calr::DomainError("unknown bounds family");
}

std::string bounds_csv(const Scenario& s, const calr::SweepTemplate& tpl, const calr::SourceSpectrum& src,
                       const calr::Coupling& c, const calr::EnergySweep& sweep, std::vector<std::string>& warnings) {
  Csv csv({"eta", "family", "k_ref", "lambda", "value", "v_energy", "w_energy", "source_pairing", "psi_energy", "E",
           "constraint_residual", "status"});
  const std::string family = to_string(s.bounds->family);
  for (const auto& p : sweep.points) {
    const int k0 = coupling_degree(c, p);
    try {
      const calr::LayeredConfig cfg = calr::materials_at(tpl, k0, p.eta);
      const calr::BoundReport r = evaluate_bound(*s.bounds, cfg, src, k0, p.eta);
      csv.row({fmt(p.eta), family, std::to_string(r.family.degree), fmt(r.family.lambda.real()), fmt(r.value),
               fmt(part(r, "v-energy")), fmt(part(r, "w-energy")), fmt(part(r, "source-pairing")),
               fmt(part(r, "psi-energy")), p.ok() ? fmt(p.total.real()) : "",
               fmt(diagnostic(r, "constraint-residual")), "ok"});
    } catch (const calr::ModeSingularity& e) {
      warnings.push_back("bounds at eta=" + fmt(p.eta) + ": " + e.what());
      csv.row({fmt(p.eta), family, "", "", "", "", "", "", "", "", "", e.what()});
    }
  }
  return csv.str();
}

std::string profile_csv(const Scenario& s, const calr::SweepTemplate& tpl, const calr::SourceSpectrum& src,
                        const calr::Coupling& c, const calr::EnergySweep& sweep, std::vector<std::string>& warnings) {
  Csv csv({"r", "theta", "phi", "re_u", "im_u", "abs_u", "abs_anomaly"});
  // the smallest eta of the grid
  std::size_t at = 0;
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    if (sweep.points[i].eta < sweep.points[at].eta) at = i;
  }
  const auto& p = sweep.points[at];
  try {
    const calr::FieldEvaluator field_at(calr::materials_at(tpl, coupling_degree(c, p), p.eta), src);
    const double q = src.support_radius();
    const double lo = 0.1 * s.r_i;
    const double hi = 3.0 * q;
    for (int j = 0; j < kProfilePoints; ++j) {
      const double r = lo * std::pow(hi / lo, static_cast<double>(j) / (kProfilePoints - 1));
      if (r == q) continue;
      const calr::FieldSample f = field_at.sample({r, kProfileTheta, 0.0});
      csv.row({fmt(r), fmt(kProfileTheta), fmt(0.0), fmt(f.value.real()), fmt(f.value.imag()), fmt(std::abs(f.value)),
               fmt(std::abs(f.anomaly))});
    }
  } catch (const calr::ModeSingularity& e) {
    warnings.push_back("field profile at eta=" + fmt(p.eta) + ": " + e.what());
  }
  return csv.str();
}

std::string diagnostic_csv(const calr::CalrDiagnostic& d) {
  Csv csv({"eta", "k_eta", "E", "ratio", "status", "probe_radius", "trend", "energy_verdict"});
  for (const auto& p : d.points) {
    csv.row({fmt(p.eta), k_cell(p.k_eta), fmt(p.energy), fmt(p.ratio), status_cell(p.status), fmt(d.probe_radius),
             calr::to_string(d.trend), calr::to_string(d.energy_verdict)});
  }
  return csv.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunArtifacts run_scenario(Scenario s, const RunOptions& opt) {
  if (opt.kmax) {
    if (*opt.kmax < 1) throw ScenarioError("--kmax", "must be >= 1");
    // rule-generated spectra are regenerated, listed ones are truncated below
    if (s.source.rule == CoefficientRule::Geometric || s.source.rule == CoefficientRule::Constant) {
      s.source.k_max = *opt.kmax;
    }
  }
  check_preconditions(s);
  const calr::SweepTemplate tpl = sweep_template(s);
  const calr::Coupling c = coupling(s);
  calr::SourceSpectrum src = build_source(s);
  if (opt.kmax) src = src.truncated(*opt.kmax);
  const std::vector<double> etas = build_etas(s);

  RunArtifacts a;
  const calr::EnergySweep sweep = calr::eta_sweep(tpl, src, etas, c, opt.threads);
  a.verdict = sweep.verdict;
  for (const auto& p : sweep.points) {
    if (!p.ok()) a.warnings.push_back("energy at eta=" + fmt(p.eta) + ": " + p.status);
  }

  for (Output o : s.outputs) {
    const std::string file = output_file(o);
    switch (o) {
      case Output::EnergySweep: a.csv[file] = energy_csv(sweep); break;
      case Output::Bounds: a.csv[file] = bounds_csv(s, tpl, src, c, sweep, a.warnings); break;
      case Output::FieldProfile: a.csv[file] = profile_csv(s, tpl, src, c, sweep, a.warnings); break;
      case Output::CalrDiagnostic:
        a.csv[file] = diagnostic_csv(calr::calr_diagnostic(tpl, src, etas, c, s.probe_radius, opt.threads));
        break;
    }
  }

  json points = json::array();
  for (const auto& p : sweep.points) {
    json j{{"eta", p.eta}, {"status", status_cell(p.status)}};
    if (p.k_eta) j["k_eta"] = *p.k_eta;
    points.push_back(j);
  }
  json files = json::array();
  for (Output o : s.outputs) files.push_back(output_file(o));
  a.manifest = {{"tool", "calr_lab"},
                {"version", calr::kVersion},
                {"scenario", s.document},
                {"threads", opt.threads},
                {"kmax_override", opt.kmax ? json(*opt.kmax) : json(nullptr)},
                {"outputs", files},
                {"verdict", calr::to_string(sweep.verdict)},
                {"expected_verdict", calr::to_string(s.expected_verdict)},
                {"points", points},
                {"warnings", a.warnings},
                {"timestamp", utc_timestamp()}};
  return a;
}

void write_artifacts(const RunArtifacts& a, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, body] : a.csv) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
  }
  std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
  m << a.manifest.dump(2) << '\n';
  if (!m) throw std::runtime_error("cannot write manifest.json in " + dir);
}

}  // namespace calr_lab
