// neqm: bound states of the finite square well under Newton's-equivalent
// Hamiltonians.
//
// exit codes: 0 ok, 2 invalid arguments, 3 numerical-domain error,
//             4 selfcheck failure

#include <neqm/core.hpp>
#include <neqm/io.hpp>
#include <neqm/qm_oracle.hpp>
#include <neqm/selfcheck.hpp>
#include <neqm/solver.hpp>
#include <neqm/wavefunction.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace neqm;

constexpr int kExitInvalid = 2;
constexpr int kExitDomain = 3;
constexpr int kExitSelfcheck = 4;

struct Common {
  std::string format = "csv";
  std::string out;
  bool full_precision = false;
  unsigned precision_bits = 0;  // 0: environment or default
  int samples = 500;
  double refine_tol = 1e-10;
};

unsigned resolve_bits(unsigned flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("NEQM_PRECISION_BITS")) {
    try {
      int v = std::stoi(env);
      if (v >= 16) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("NEQM_PRECISION_BITS='") + env +
                                "' is not an integer >= 16");
  }
  return kDefaultMantissaBits;
}

void add_output_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "output file (manifest written to PATH.manifest.json)");
  cmd->add_flag("--full-precision", c.full_precision,
                "17 significant digits instead of 6");
}

void add_solver_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--samples", c.samples, "mu samples on (0, mu_max]")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--precision-bits", c.precision_bits,
                  "mantissa bits (default 256, or NEQM_PRECISION_BITS)")
      ->check(CLI::Range(16u, 1u << 20));
  cmd->add_option("--refine-tol", c.refine_tol,
                  "relative bisection width for each root");
}

ScanConfig scan_config(const Common& c, int L) {
  ScanConfig cfg;
  cfg.L = L;
  cfg.samples = c.samples;
  cfg.refine_tol = c.refine_tol;
  cfg.mantissa_bits = resolve_bits(c.precision_bits);
  cfg.validate();
  return cfg;
}

std::string with_suffix(const std::string& path, const std::string& tag) {
  auto slash = path.find_last_of('/');
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

class Emitter {
 public:
  Emitter(const Common& c, std::string command)
      : common_(c), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
  }

  RunManifest& manifest() { return manifest_; }

  void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
      std::cout << text;
    } else {
      write_file(path, text);
      manifest_.outputs.push_back(path);
    }
  }

  void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
      std::cerr << "warning: " << w << "\n";
      manifest_.warnings.push_back(w);
    }
  }

  void finish() {
    if (common_.out.empty()) return;
    manifest_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    write_file(manifest_path(common_.out), manifest_.to_json().dump(2) + "\n");
  }

 private:
  const Common& common_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

int run_qm(const Common& c, double v0) {
  if (!(v0 >= 0)) throw std::invalid_argument("v0 must be >= 0");
  Emitter em(c, "qm");
  em.manifest().parameters["v0"] = v0;
  em.emit(render(qm_table(v0, qm::qm_spectrum(v0), c.full_precision),
                 parse_format(c.format)),
          c.out);
  em.finish();
  return 0;
}

int run_spectrum(const Common& c, double beta, double v0, int L) {
  Params p = Params::make(beta, v0);
  ScanConfig cfg = scan_config(c, L);
  Emitter em(c, "spectrum");
  em.manifest().parameters = {{"beta", beta}, {"v0", v0}, {"refine_tol", c.refine_tol}};
  em.manifest().mantissa_bits = cfg.mantissa_bits;
  em.manifest().samples = cfg.samples;
  em.manifest().L = L;
  SpectrumTable t = spectrum(p, cfg);
  em.warn(t.warnings);
  em.emit(render(spectrum_table(t, c.full_precision), parse_format(c.format)),
          c.out);
  em.finish();
  return 0;
}

int run_converge(const Common& c, const std::vector<double>& betas, double v0,
                 int L_max, int states) {
  if (L_max < 0) throw std::invalid_argument("L must be >= 0");
  if (states < 1) throw std::invalid_argument("states must be >= 1");
  ScanConfig cfg = scan_config(c, 0);
  Emitter em(c, "converge");
  em.manifest().parameters = {{"beta", betas}, {"v0", v0}, {"L_max", L_max},
                              {"states", states}, {"refine_tol", c.refine_tol}};
  em.manifest().mantissa_bits = cfg.mantissa_bits;
  em.manifest().samples = cfg.samples;
  em.manifest().L = L_max;
  std::vector<int> Ls;
  for (int L = 0; L <= L_max; ++L) Ls.push_back(L);
  std::vector<ConvergenceRow> rows;
  for (double beta : betas) {
    auto part = convergence_sweep(Params::make(beta, v0), Ls, cfg, states);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  em.emit(render(converge_table(rows, c.full_precision), parse_format(c.format)),
          c.out);
  em.finish();
  return 0;
}

int run_sweep(const Common& c, double v0, double bmin, double bmax, int steps,
              int L, bool with_qm) {
  if (!(bmin > 0) || !(bmax >= bmin))
    throw std::invalid_argument("need 0 < beta-min <= beta-max");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  ScanConfig cfg = scan_config(c, L);
  Emitter em(c, "sweep-beta");
  em.manifest().parameters = {{"v0", v0}, {"beta_min", bmin}, {"beta_max", bmax},
                              {"steps", steps}, {"refine_tol", c.refine_tol}};
  em.manifest().mantissa_bits = cfg.mantissa_bits;
  em.manifest().samples = cfg.samples;
  em.manifest().L = L;
  auto rows = beta_sweep(v0, linear_grid(bmin, bmax, steps), cfg);
  em.emit(render(sweep_table(v0, L, rows, with_qm, c.full_precision),
                 parse_format(c.format)),
          c.out);
  em.finish();
  return 0;
}

struct WaveArgs {
  double beta = 0, v0 = 0;
  int L = 0;
  int state_index = 0;
  double x_min = -3, x_max = 3;
  int points = 121;
  std::string residual_variant = "psi2";
};

int run_wavefunction(const Common& c, const WaveArgs& a) {
  Params p = Params::make(a.beta, a.v0);
  ScanConfig cfg = scan_config(c, a.L);
  if (a.points < 1) throw std::invalid_argument("grid-points must be >= 1");
  Emitter em(c, "wavefunction");
  em.manifest().parameters = {{"beta", a.beta}, {"v0", a.v0},
                              {"state_index", a.state_index},
                              {"x_min", a.x_min}, {"x_max", a.x_max},
                              {"grid_points", a.points},
                              {"residual_variant", a.residual_variant},
                              {"refine_tol", c.refine_tol}};
  em.manifest().mantissa_bits = cfg.mantissa_bits;
  em.manifest().samples = cfg.samples;
  em.manifest().L = a.L;
  SpectrumTable t = spectrum(p, cfg);
  em.warn(t.warnings);
  if (a.state_index < 0 || a.state_index >= static_cast<int>(t.states.size()))
    throw std::invalid_argument("state-index " + std::to_string(a.state_index) +
                                " out of range (" + std::to_string(t.states.size()) +
                                " states)");
  ExtractionOptions ex;
  ex.mantissa_bits = cfg.mantissa_bits;
  auto w = coefficients_at_root(t.states[a.state_index], ex);
  ResidualOptions ro;
  ro.mantissa_bits = cfg.mantissa_bits;
  ro.variant = a.residual_variant == "psi3" ? ResidualVariant::mirror_outside
                                            : ResidualVariant::inside;
  Table grid = psi_grid_table(w, linear_grid(a.x_min, a.x_max, a.points),
                              c.full_precision);
  Table coeffs = coefficient_table(w, c.full_precision);
  Table res = residual_table(matching_residuals(w, ro), c.full_precision);
  Format f = parse_format(c.format);
  if (f == Format::json) {
    nlohmann::ordered_json j;
    j["psi"] = to_json(grid);
    j["coefficients"] = to_json(coeffs);
    j["residuals"] = to_json(res);
    em.emit(j.dump(2) + "\n", c.out);
  } else if (c.out.empty()) {
    em.emit(to_csv(grid) + "\n" + to_csv(coeffs) + "\n" + to_csv(res), "");
  } else {
    em.emit(to_csv(grid), c.out);
    em.emit(to_csv(coeffs), with_suffix(c.out, "coefficients"));
    em.emit(to_csv(res), with_suffix(c.out, "residuals"));
  }
  em.finish();
  return 0;
}

int run_selfcheck(const Common& c, SelfcheckOptions o) {
  o.mantissa_bits = resolve_bits(c.precision_bits);
  Emitter em(c, "selfcheck");
  em.manifest().parameters = {{"inject_qo_sign_flip", o.inject_qo_sign_flip},
                              {"precision_beta", o.precision_beta},
                              {"precision_v0", o.precision_v0},
                              {"precision_L", o.precision_L},
                              {"precision_samples", o.precision_samples}};
  em.manifest().mantissa_bits = o.mantissa_bits;
  auto results = run_selfcheck(o);
  Table t{{"check", "status", "detail"}, {}};
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    t.add({r.name, r.passed ? "pass" : "fail", detail});
  }
  em.emit(render(t, parse_format(c.format)), c.out);
  em.finish();
  return ok ? 0 : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bound states of the finite square well under Newton's-equivalent "
               "Hamiltonians (hbar = m = a = 1)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", neqm::kVersion);

  Common common;
  double beta = 0, v0 = 0;
  int L = -1;

  auto* qm = app.add_subcommand("qm", "standard-well spectrum");
  qm->add_option("--v0", v0, "well depth m a^2 V0 / hbar^2")->required();
  add_output_options(qm, common);

  auto* spec = app.add_subcommand("spectrum", "bound states at one (beta, v0, L)");
  spec->add_option("--beta", beta, "beta hbar / a")->required();
  spec->add_option("--v0", v0, "well depth")->required();
  spec->add_option("--L", L, "truncation order")->required();
  add_solver_options(spec, common);
  add_output_options(spec, common);

  std::vector<double> betas;
  int states = 2;
  auto* conv = app.add_subcommand("converge", "lowest energies for L = 0..L_max");
  conv->add_option("--beta", betas, "one or more beta values (comma separated)")
      ->required()
      ->delimiter(',');
  conv->add_option("--v0", v0, "well depth")->required();
  conv->add_option("--L", L, "largest truncation order")->required();
  conv->add_option("--states", states, "states per (L, beta)");
  add_solver_options(conv, common);
  add_output_options(conv, common);

  double bmin = 0.01, bmax = 10;
  int steps = 100;
  bool no_qm = false;
  auto* sweep = app.add_subcommand("sweep-beta", "spectrum across a beta grid");
  sweep->add_option("--v0", v0, "well depth")->required();
  sweep->add_option("--beta-min", bmin, "first beta");
  sweep->add_option("--beta-max", bmax, "last beta");
  sweep->add_option("--steps", steps, "number of beta values");
  sweep->add_option("--L", L, "truncation order")->required();
  sweep->add_flag("--no-qm", no_qm, "omit the standard-well rows at beta = 0");
  add_solver_options(sweep, common);
  add_output_options(sweep, common);

  WaveArgs wa;
  auto* wave = app.add_subcommand("wavefunction",
                                  "coefficients, psi on a grid and matching residuals");
  wave->add_option("--beta", wa.beta, "beta hbar / a")->required();
  wave->add_option("--v0", wa.v0, "well depth")->required();
  wave->add_option("--L", wa.L, "truncation order")->required();
  wave->add_option("--state-index", wa.state_index, "0 = ground state");
  wave->add_option("--x-min", wa.x_min, "grid start");
  wave->add_option("--x-max", wa.x_max, "grid end");
  wave->add_option("--grid-points", wa.points, "grid size");
  wave->add_option("--residual-variant", wa.residual_variant,
                   "psi2: psi_I - psi_II at x = -1 (default); psi3: psi_I - "
                   "psi_III continued to x = -1")
      ->check(CLI::IsMember({"psi2", "psi3"}));
  add_solver_options(wave, common);
  add_output_options(wave, common);

  neqm::SelfcheckOptions so;
  auto* self = app.add_subcommand("selfcheck", "run the invariant suite");
  self->add_option("--precision-bits", common.precision_bits,
                   "working mantissa bits (doubling check compares with twice this)")
      ->check(CLI::Range(16u, 1u << 20));
  self->add_option("--precision-beta", so.precision_beta, "beta for the doubling check");
  self->add_option("--precision-v0", so.precision_v0, "v0 for the doubling check");
  self->add_option("--precision-L", so.precision_L, "L for the doubling check");
  self->add_option("--precision-samples", so.precision_samples,
                   "grid size for the doubling check");
  self->add_flag("--inject-qo-sign-flip", so.inject_qo_sign_flip,
                 "corrupt the odd inside basis (the reflection check must fail)");
  add_output_options(self, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*qm) return run_qm(common, v0);
    if (*spec) return run_spectrum(common, beta, v0, L);
    if (*conv) return run_converge(common, betas, v0, L, states);
    if (*sweep) return run_sweep(common, v0, bmin, bmax, steps, L, !no_qm);
    if (*wave) return run_wavefunction(common, wa);
    if (*self) return run_selfcheck(common, so);
  } catch (const neqm::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const neqm::AmbiguousNullspace& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
