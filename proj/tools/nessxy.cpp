// Command-line front end: single-point flux, coupling sweeps, dense-oracle
// comparisons, wave-function dumps, and the self-verification suite.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nessxy/checks.hpp"
#include "nessxy/flux.hpp"
#include "nessxy/lattice.hpp"
#include "nessxy/momentum.hpp"
#include "nessxy/oracle.hpp"
#include "nessxy/scattering.hpp"
#include "nessxy/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitResolution = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Deterministic JSON writer: doubles carry 17 significant digits, keys keep
// insertion order, output is byte-stable across reruns.
class JsonWriter {
 public:
  JsonWriter& begin(const std::string& key = "") {
    comma();
    if (!key.empty()) os_ << '"' << json_escape(key) << "\": ";
    os_ << '{';
    first_ = true;
    return *this;
  }
  JsonWriter& end() {
    os_ << '}';
    first_ = false;
    return *this;
  }
  JsonWriter& field(const std::string& key, double v) {
    prefix(key);
    if (std::isfinite(v))
      os_ << fmt(v);
    else
      os_ << '"' << fmt(v) << '"';  // JSON has no nan/inf literals
    return *this;
  }
  JsonWriter& field(const std::string& key, long long v) {
    prefix(key);
    os_ << v;
    return *this;
  }
  JsonWriter& field(const std::string& key, bool v) {
    prefix(key);
    os_ << (v ? "true" : "false");
    return *this;
  }
  JsonWriter& field(const std::string& key, const std::string& v) {
    prefix(key);
    os_ << '"' << json_escape(v) << '"';
    return *this;
  }
  JsonWriter& field_raw(const std::string& key, const std::string& rendered) {
    prefix(key);
    os_ << rendered;
    return *this;
  }
  std::string str() const { return os_.str() + "\n"; }

 private:
  void comma() {
    if (!first_) os_ << ", ";
    first_ = true;
  }
  void prefix(const std::string& key) {
    if (!first_) os_ << ", ";
    first_ = false;
    os_ << '"' << json_escape(key) << "\": ";
  }
  std::ostringstream os_;
  bool first_ = true;
};

int env_threads() {
  const char* raw = std::getenv("NESSXY_THREADS");
  if (!raw) return 0;
  const long v = std::strtol(raw, nullptr, 10);
  return v > 0 ? static_cast<int>(v) : 1;
}

int write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open output file: " << path << "\n";
    return kExitUsage;
  }
  out << content;
  return kExitOk;
}

// Flag-over-config-file resolution for one subcommand.
class ParamSource {
 public:
  ParamSource(const nlohmann::json* cfg) : cfg_(cfg) {}

  template <class T>
  void resolve(const CLI::Option* opt, const char* key, T& value,
               bool required) {
    if (opt->count() > 0) return;  // command line wins
    if (cfg_ && cfg_->contains(key)) {
      try {
        value = cfg_->at(key).get<T>();
        return;
      } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("config field '") + key +
                                    "' has the wrong type");
      }
    }
    if (required) missing_.push_back(key);
  }

  void enforce() const {
    if (missing_.empty()) return;
    std::string msg = "missing required parameter(s):";
    for (const auto& k : missing_) msg += " --" + std::string(k);
    throw std::invalid_argument(msg);
  }

 private:
  const nlohmann::json* cfg_;
  std::vector<std::string> missing_;
};

struct ManifestInfo {
  std::string subcommand;
  unsigned long long seed = 12345;
  std::string output = "-";
  std::vector<std::pair<std::string, std::string>> params;  // key, rendered

  void add(const std::string& key, double v) { params.emplace_back(key, fmt(v)); }
  void add(const std::string& key, long long v) {
    params.emplace_back(key, std::to_string(v));
  }

  std::string csv_header() const {
    std::ostringstream os;
    os << "# subcommand=" << subcommand << "\n";
    os << "# version=" << nessxy::kVersion << "\n";
    os << "# seed=" << seed << "\n";
    for (const auto& [k, v] : params) os << "# " << k << "=" << v << "\n";
    os << "# output=" << output << "\n";
    return os.str();
  }

  void json_object(JsonWriter& w) const {
    w.begin("manifest");
    w.field("subcommand", subcommand);
    w.field("version", std::string(nessxy::kVersion));
    w.field("seed", static_cast<long long>(seed));
    w.begin("parameters");
    for (const auto& [k, v] : params) w.field_raw(k, v);
    w.end();
    w.field("output", output);
    w.end();
  }
};

int cmd_flux(double gamma, double beta_l, double beta_r, double tol,
             const ManifestInfo& mf) {
  const auto fr = nessxy::flux::heat_flux(gamma, beta_l, beta_r, tol);
  JsonWriter w;
  w.begin();
  mf.json_object(w);
  w.field("gamma", fr.gamma);
  w.field("beta_l", fr.beta_l);
  w.field("beta_r", fr.beta_r);
  w.field("J", fr.j);
  w.field("sigma", fr.sigma);
  w.field("lower_bound", fr.lower_bound);
  w.field("quad_error", fr.quad_error);
  w.field("converged", fr.converged);
  w.end();
  const int rc = write_output(mf.output, w.str());
  if (rc != kExitOk) return rc;
  return fr.converged ? kExitOk : kExitNumerical;
}

int cmd_sweep(double gamma_min, double gamma_max, long long steps,
              double beta_l, double beta_r, double tol, int threads,
              const ManifestInfo& mf) {
  if (!(gamma_min <= gamma_max))
    throw std::invalid_argument("sweep: --gamma-min must not exceed --gamma-max");
  if (steps < 1) throw std::invalid_argument("sweep: --steps must be >= 1");
  std::vector<double> gammas(steps);
  for (long long i = 0; i < steps; ++i)
    gammas[i] = steps == 1 ? gamma_min
                           : gamma_min + (gamma_max - gamma_min) * i / (steps - 1);
  const auto rows = nessxy::flux::sweep(gammas, beta_l, beta_r, tol, threads);

  std::ostringstream os;
  os << mf.csv_header();
  os << "gamma,J,sigma,lower_bound,quad_error\n";
  bool all_converged = true;
  for (const auto& r : rows) {
    const double sentinel = std::numeric_limits<double>::quiet_NaN();
    const double qe = r.converged ? r.quad_error : sentinel;
    all_converged = all_converged && r.converged;
    os << fmt(r.gamma) << ',' << fmt(r.j) << ',' << fmt(r.sigma) << ','
       << fmt(r.lower_bound) << ',' << fmt(qe) << "\n";
  }
  const int rc = write_output(mf.output, os.str());
  if (rc != kExitOk) return rc;
  return all_converged ? kExitOk : kExitNumerical;
}

int cmd_oracle(double gamma, double beta_l, double beta_r, long long n,
               long long a, long long lattice, double t_max, double accept,
               const ManifestInfo& mf) {
  nessxy::lattice::LatticeConfig cfg;
  cfg.n = static_cast<int>(n);
  cfg.a = static_cast<int>(a);
  cfg.gamma = gamma;
  cfg.beta_l = beta_l;
  cfg.beta_r = beta_r;
  cfg.trunc = static_cast<int>(lattice);
  cfg.validate();  // invalid_argument -> usage exit

  const double budget = nessxy::oracle::wavefront_budget(cfg);
  if (!(t_max > 0) || t_max > budget) {
    std::cerr << "oracle: averaging window t_max=" << fmt(t_max)
              << " exceeds the wavefront budget " << fmt(budget)
              << " of lattice=" << lattice
              << " (grow --lattice or shrink --t-max)\n";
    return kExitResolution;
  }

  const auto run = nessxy::oracle::ergodic_flux(cfg, t_max);
  const auto closed =
      nessxy::flux::heat_flux(gamma, beta_l, beta_r, 1e-12);
  const double abs_diff = std::abs(run.j_left - closed.j);

  JsonWriter w;
  w.begin();
  mf.json_object(w);
  w.begin("config");
  w.field("gamma", gamma);
  w.field("beta_l", beta_l);
  w.field("beta_r", beta_r);
  w.field("n", n);
  w.field("a", a);
  w.field("lattice", lattice);
  w.end();
  w.field("J_num", run.j_left);
  w.field("J_closed", closed.j);
  w.field("abs_diff", abs_diff);
  w.field("first_law_residual", run.first_law_residual);
  w.field("bound_state_count",
          static_cast<long long>(run.bound_state_count));
  w.begin("diagnostics");
  w.field("j_left", run.j_left);
  w.field("j_right", run.j_right);
  w.field("t_max", run.t_max);
  w.field("window_start", run.window_start);
  w.field("wavefront_budget", run.wavefront_budget);
  w.field("wavefront_ok", run.wavefront_ok);
  w.field("accept", accept);
  w.end();
  w.end();
  const int rc = write_output(mf.output, w.str());
  if (rc != kExitOk) return rc;
  return abs_diff <= accept ? kExitOk : kExitNumerical;
}

int cmd_wave(double gamma, long long x, long long a, long long grid,
             const ManifestInfo& mf) {
  const auto ks = nessxy::momentum::momentum_grid(static_cast<int>(grid));
  const auto img =
      nessxy::scattering::wave_apply(gamma, static_cast<int>(x),
                                     static_cast<int>(a));
  std::vector<double> omitted;
  for (double k : ks)
    if (!img.particle.defined_at(k)) omitted.push_back(k);

  std::ostringstream os;
  os << mf.csv_header();
  os << "# exceptional=";
  for (size_t i = 0; i < omitted.size(); ++i)
    os << (i ? ";" : "") << fmt(omitted[i]);
  os << "\n";
  os << "k,re_w1,im_w1,re_w2,im_w2\n";
  for (double k : ks) {
    if (!img.particle.defined_at(k)) continue;
    const auto w1 = img.particle.eval(k);
    const auto w2 = img.hole.eval(k);
    os << fmt(k) << ',' << fmt(w1.real()) << ',' << fmt(w1.imag()) << ','
       << fmt(w2.real()) << ',' << fmt(w2.imag()) << "\n";
  }
  return write_output(mf.output, os.str());
}

int cmd_verify(bool fast, unsigned long long seed, int threads) {
  auto results = nessxy::checks::fast_suite(seed, threads);
  if (!fast) {
    auto heavy = nessxy::checks::oracle_suite();
    results.insert(results.end(), heavy.begin(), heavy.end());
  }
  size_t passed = 0;
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    std::printf("[%s] %-26s value=%-12.4g threshold=%-10.4g (%s) [%.2fs]\n",
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value, r.threshold,
                r.detail.c_str(), r.seconds);
  }
  std::printf("verify: %zu of %zu checks passed\n", passed, results.size());
  return passed == results.size() ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state heat transport for a chain with one anisotropic bond"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nessxy::kVersion);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file supplying parameter defaults (flags override)");
  unsigned long long seed = 12345;
  app.add_option("--seed", seed,
                 "Seed recorded in manifests and used by randomized checks");

  // ---- flux ----
  auto* sub_flux = app.add_subcommand("flux", "Closed-form steady-state heat flux");
  sub_flux->fallthrough();
  double f_gamma = 0.0, f_bl = 0.0, f_br = 0.0, f_tol = 1e-10;
  std::string f_out = "-";
  auto* of_gamma = sub_flux->add_option("--gamma", f_gamma, "Bond coupling");
  auto* of_bl = sub_flux->add_option("--beta-l", f_bl, "Left inverse temperature");
  auto* of_br = sub_flux->add_option("--beta-r", f_br, "Right inverse temperature");
  auto* of_tol = sub_flux->add_option("--tol", f_tol, "Quadrature tolerance");
  auto* of_out = sub_flux->add_option("--output", f_out, "Output path (- for stdout)");

  // ---- sweep ----
  auto* sub_sweep = app.add_subcommand("sweep", "Flux over a coupling grid (CSV)");
  sub_sweep->fallthrough();
  double s_min = 0.0, s_max = 0.0, s_bl = 0.0, s_br = 0.0, s_tol = 1e-10;
  long long s_steps = 0;
  std::string s_out = "-";
  auto* os_min = sub_sweep->add_option("--gamma-min", s_min, "Grid start");
  auto* os_max = sub_sweep->add_option("--gamma-max", s_max, "Grid end");
  auto* os_steps = sub_sweep->add_option("--steps", s_steps, "Grid points");
  auto* os_bl = sub_sweep->add_option("--beta-l", s_bl, "Left inverse temperature");
  auto* os_br = sub_sweep->add_option("--beta-r", s_br, "Right inverse temperature");
  auto* os_tol = sub_sweep->add_option("--tol", s_tol, "Quadrature tolerance");
  auto* os_out = sub_sweep->add_option("--output", s_out, "Output path (- for stdout)");

  // ---- oracle ----
  auto* sub_oracle = app.add_subcommand(
      "oracle", "Compare the closed-form flux with a finite-window average");
  sub_oracle->fallthrough();
  double o_gamma = 0.0, o_bl = 0.0, o_br = 0.0, o_tmax = 0.0, o_accept = 1e-2;
  long long o_n = 0, o_a = 0, o_lat = 0;
  std::string o_out = "-";
  auto* oo_gamma = sub_oracle->add_option("--gamma", o_gamma, "Bond coupling");
  auto* oo_bl = sub_oracle->add_option("--beta-l", o_bl, "Left inverse temperature");
  auto* oo_br = sub_oracle->add_option("--beta-r", o_br, "Right inverse temperature");
  auto* oo_n = sub_oracle->add_option("--n", o_n, "Sample half-width");
  auto* oo_a = sub_oracle->add_option("--a", o_a, "Perturbed bond position");
  auto* oo_lat = sub_oracle->add_option("--lattice", o_lat, "Window half-width");
  auto* oo_tmax = sub_oracle->add_option("--t-max", o_tmax, "Averaging horizon");
  auto* oo_accept =
      sub_oracle->add_option("--accept", o_accept, "Acceptance threshold");
  auto* oo_out = sub_oracle->add_option("--output", o_out, "Output path (- for stdout)");

  // ---- wave ----
  auto* sub_wave = app.add_subcommand(
      "wave", "Momentum-space wave-operator image of one site (CSV)");
  sub_wave->fallthrough();
  double w_gamma = 0.0;
  long long w_x = 0, w_a = 0, w_grid = 0;
  std::string w_out = "-";
  auto* ow_gamma = sub_wave->add_option("--gamma", w_gamma, "Bond coupling");
  auto* ow_x = sub_wave->add_option("--x", w_x, "Site index");
  auto* ow_a = sub_wave->add_option("--a", w_a, "Perturbed bond position");
  auto* ow_grid = sub_wave->add_option("--grid", w_grid, "Momentum grid size");
  auto* ow_out = sub_wave->add_option("--output", w_out, "Output path (- for stdout)");

  // ---- verify ----
  auto* sub_verify =
      app.add_subcommand("verify", "Run the self-verification suite");
  sub_verify->fallthrough();
  bool v_fast = false;
  sub_verify->add_flag("--fast", v_fast, "Skip the dense-oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  nlohmann::json cfg_json;
  const nlohmann::json* cfg = nullptr;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot read config file: " << config_path << "\n";
      return kExitUsage;
    }
    try {
      in >> cfg_json;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return kExitUsage;
    }
    cfg = &cfg_json;
    if (cfg_json.contains("seed") && app.count("--seed") == 0)
      seed = cfg_json["seed"].get<unsigned long long>();
  }

  const int threads = env_threads();

  try {
    if (sub_flux->parsed()) {
      ParamSource ps(cfg);
      ps.resolve(of_gamma, "gamma", f_gamma, true);
      ps.resolve(of_bl, "beta_l", f_bl, true);
      ps.resolve(of_br, "beta_r", f_br, true);
      ps.resolve(of_tol, "tol", f_tol, false);
      ps.resolve(of_out, "output", f_out, false);
      ps.enforce();
      if (!(f_tol > 0)) throw std::invalid_argument("--tol must be positive");
      ManifestInfo mf;
      mf.subcommand = "flux";
      mf.seed = seed;
      mf.output = f_out;
      mf.add("gamma", f_gamma);
      mf.add("beta_l", f_bl);
      mf.add("beta_r", f_br);
      mf.add("tol", f_tol);
      return cmd_flux(f_gamma, f_bl, f_br, f_tol, mf);
    }
    if (sub_sweep->parsed()) {
      ParamSource ps(cfg);
      ps.resolve(os_min, "gamma_min", s_min, true);
      ps.resolve(os_max, "gamma_max", s_max, true);
      ps.resolve(os_steps, "steps", s_steps, true);
      ps.resolve(os_bl, "beta_l", s_bl, true);
      ps.resolve(os_br, "beta_r", s_br, true);
      ps.resolve(os_tol, "tol", s_tol, false);
      ps.resolve(os_out, "output", s_out, false);
      ps.enforce();
      if (!(s_tol > 0)) throw std::invalid_argument("--tol must be positive");
      ManifestInfo mf;
      mf.subcommand = "sweep";
      mf.seed = seed;
      mf.output = s_out;
      mf.add("gamma_min", s_min);
      mf.add("gamma_max", s_max);
      mf.add("steps", s_steps);
      mf.add("beta_l", s_bl);
      mf.add("beta_r", s_br);
      mf.add("tol", s_tol);
      return cmd_sweep(s_min, s_max, s_steps, s_bl, s_br, s_tol, threads, mf);
    }
    if (sub_oracle->parsed()) {
      ParamSource ps(cfg);
      ps.resolve(oo_gamma, "gamma", o_gamma, true);
      ps.resolve(oo_bl, "beta_l", o_bl, true);
      ps.resolve(oo_br, "beta_r", o_br, true);
      ps.resolve(oo_n, "n", o_n, true);
      ps.resolve(oo_a, "a", o_a, true);
      ps.resolve(oo_lat, "lattice", o_lat, true);
      ps.resolve(oo_tmax, "t_max", o_tmax, true);
      ps.resolve(oo_accept, "accept", o_accept, false);
      ps.resolve(oo_out, "output", o_out, false);
      ps.enforce();
      ManifestInfo mf;
      mf.subcommand = "oracle";
      mf.seed = seed;
      mf.output = o_out;
      mf.add("gamma", o_gamma);
      mf.add("beta_l", o_bl);
      mf.add("beta_r", o_br);
      mf.add("n", o_n);
      mf.add("a", o_a);
      mf.add("lattice", o_lat);
      mf.add("t_max", o_tmax);
      mf.add("accept", o_accept);
      return cmd_oracle(o_gamma, o_bl, o_br, o_n, o_a, o_lat, o_tmax, o_accept,
                        mf);
    }
    if (sub_wave->parsed()) {
      ParamSource ps(cfg);
      ps.resolve(ow_gamma, "gamma", w_gamma, true);
      ps.resolve(ow_x, "x", w_x, true);
      ps.resolve(ow_a, "a", w_a, true);
      ps.resolve(ow_grid, "grid", w_grid, true);
      ps.resolve(ow_out, "output", w_out, false);
      ps.enforce();
      ManifestInfo mf;
      mf.subcommand = "wave";
      mf.seed = seed;
      mf.output = w_out;
      mf.add("gamma", w_gamma);
      mf.add("x", w_x);
      mf.add("a", w_a);
      mf.add("grid", w_grid);
      return cmd_wave(w_gamma, w_x, w_a, w_grid, mf);
    }
    if (sub_verify->parsed()) {
      return cmd_verify(v_fast, seed, threads);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
