#pragma once

// Bound-state search: sample the parity-sector determinants on an equally
// spaced mu grid, bracket sign changes, refine each by bisection and map the
// roots to energies.

#include <neqm/core.hpp>
#include <neqm/linalg.hpp>
#include <neqm/matcher.hpp>
#include <neqm/real.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace neqm {

struct ScanConfig {
  int samples = 500;
  int L = 0;
  double refine_tol = 1e-10;
  unsigned mantissa_bits = kDefaultMantissaBits;
  DetOptions det{};
  /// Refine only the lowest this-many brackets of each sector (< 0: all).
  int max_roots_per_sector = -1;

  void validate() const {
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    if (L < 0) throw std::invalid_argument("L must be >= 0");
    if (!(refine_tol > 0) || refine_tol >= 1)
      throw std::invalid_argument("refine_tol must lie in (0, 1)");
    if (mantissa_bits < 16)
      throw std::invalid_argument("mantissa_bits must be >= 16");
  }
};

/// The last grid point sits this far (relative) below mu_max: at mu_max
/// itself rho = 0 and the paired outside columns coincide for L >= 1.
inline constexpr double kEndpointOffset = 1e-8;

struct Bracket {
  double lo = 0;
  double hi = 0;
  int sign_lo = 0;
  int sign_hi = 0;

  bool exact() const { return lo == hi; }
};

struct SectorScan {
  Parity parity = Parity::even;
  std::vector<double> grid;
  std::vector<int> signs;
  std::vector<double> log2_abs;
  std::vector<Bracket> brackets;
  std::vector<double> suspected_degenerate;  // mu of sign-preserving dips
};

struct BoundState {
  double mu = 0;
  double energy = 0;
  Parity parity = Parity::even;
  int L = 0;
  Params params{};
  bool marginal = false;    // root within tolerance of mu_max
  bool degenerate = false;  // the other sector also vanishes here
};

struct SpectrumTable {
  std::vector<BoundState> states;
  Params params{};
  ScanConfig config{};
  unsigned effective_bits = 0;
  std::vector<std::string> warnings;
};

/// Grid mu_i = mu_max i / samples for i = 1..samples, last point pulled in
/// by kEndpointOffset. Empty when mu_max = 0.
inline std::vector<double> scan_grid(const Params& p, int samples) {
  std::vector<double> grid;
  const double top = mu_max<double>(p);
  if (!(top > 0)) return grid;
  grid.reserve(samples);
  for (int i = 1; i <= samples; ++i) {
    double mu = top * i / samples;
    if (i == samples) mu = top * (1 - kEndpointOffset);
    grid.push_back(mu);
  }
  return grid;
}

/// Sector determinant at mu; requires an active PrecisionScope.
inline ScaledValue<Real> sector_det(Parity parity, double mu, const Params& p,
                                    const ScanConfig& cfg) {
  return scaled_det(assemble_sector(parity, Real(mu), p, cfg.L), cfg.det);
}

inline SectorScan scan_sector(Parity parity, const Params& p,
                              const ScanConfig& cfg) {
  cfg.validate();
  PrecisionScope prec(cfg.mantissa_bits);
  SectorScan scan;
  scan.parity = parity;
  scan.grid = scan_grid(p, cfg.samples);
  for (double mu : scan.grid) {
    auto d = sector_det(parity, mu, p, cfg);
    scan.signs.push_back(d.sign);
    scan.log2_abs.push_back(d.log2_abs());
  }
  const std::size_t n = scan.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (scan.signs[i] == 0) {
      scan.brackets.push_back({scan.grid[i], scan.grid[i], 0, 0});
      continue;
    }
    if (i + 1 < n && scan.signs[i + 1] != 0 &&
        scan.signs[i] != scan.signs[i + 1]) {
      scan.brackets.push_back(
          {scan.grid[i], scan.grid[i + 1], scan.signs[i], scan.signs[i + 1]});
    }
    if (i > 0 && i + 1 < n && scan.signs[i - 1] == scan.signs[i] &&
        scan.signs[i + 1] == scan.signs[i]) {
      const double dip = std::log2(1e-3);
      if (scan.log2_abs[i] - scan.log2_abs[i - 1] < dip &&
          scan.log2_abs[i] - scan.log2_abs[i + 1] < dip)
        scan.suspected_degenerate.push_back(scan.grid[i]);
    }
  }
  return scan;
}

/// Sign-change brackets of the parity-sector determinant on (0, mu_max].
inline std::vector<Bracket> scan_sign_changes(Parity parity, const Params& p,
                                              const ScanConfig& cfg) {
  return scan_sector(parity, p, cfg).brackets;
}

/// Bisection on the determinant sign until the bracket is narrower than
/// refine_tol relative to its upper end; returns the midpoint.
inline double refine_root(const Bracket& bracket, Parity parity,
                          const Params& p, const ScanConfig& cfg) {
  cfg.validate();
  if (bracket.exact()) return bracket.lo;
  PrecisionScope prec(cfg.mantissa_bits);
  double lo = bracket.lo, hi = bracket.hi;
  int slo = sector_det(parity, lo, p, cfg).sign;
  int shi = sector_det(parity, hi, p, cfg).sign;
  if (slo == 0) return lo;
  if (shi == 0) return hi;
  if (slo == shi)
    throw ContractError("refine_root: determinant has the same sign at both "
                        "bracket ends");
  while (hi - lo > cfg.refine_tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    int s = sector_det(parity, mid, p, cfg).sign;
    if (s == 0) return mid;
    if (s == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double energy_at(double mu, const Params& p, unsigned bits) {
  PrecisionScope prec(bits);
  return to_double(energy_of_mu(Real(mu), p));
}

/// Both parity sectors, merged in ascending energy.
inline SpectrumTable spectrum(const Params& p, const ScanConfig& cfg) {
  cfg.validate();
  SpectrumTable table;
  table.params = p;
  table.config = cfg;
  {
    PrecisionScope prec(cfg.mantissa_bits);
    table.effective_bits = current_mantissa_bits();
  }
  const double top = mu_max<double>(p);
  const double bound = energy_upper_bound<double>(p);
  for (Parity parity : {Parity::even, Parity::odd}) {
    SectorScan scan = scan_sector(parity, p, cfg);
    for (double mu : scan.suspected_degenerate) {
      std::ostringstream os;
      os.precision(10);
      os << "suspected degenerate root (" << to_string(parity)
         << " sector) near mu = " << mu;
      table.warnings.push_back(os.str());
    }
    int taken = 0;
    for (const Bracket& b : scan.brackets) {
      if (cfg.max_roots_per_sector >= 0 && taken >= cfg.max_roots_per_sector)
        break;
      ++taken;
      BoundState st;
      st.mu = refine_root(b, parity, p, cfg);
      st.energy = energy_at(st.mu, p, cfg.mantissa_bits);
      st.parity = parity;
      st.L = cfg.L;
      st.params = p;
      st.marginal =
          top - st.mu <= std::max(cfg.refine_tol, 2 * kEndpointOffset) * top;
      {
        PrecisionScope prec(cfg.mantissa_bits);
        Parity other = parity == Parity::even ? Parity::odd : Parity::even;
        st.degenerate = sector_det(other, st.mu, p, cfg).sign == 0;
      }
      if (!(st.energy > 0 && st.energy < bound)) {
        std::ostringstream os;
        os.precision(10);
        os << "root at mu = " << st.mu << " has energy " << st.energy
           << " outside (0, " << bound << "); dropped";
        table.warnings.push_back(os.str());
        continue;
      }
      table.states.push_back(st);
    }
  }
  std::sort(table.states.begin(), table.states.end(),
            [](const BoundState& a, const BoundState& b) {
              return a.energy < b.energy;
            });
  return table;
}

struct ConvergenceRow {
  int L = 0;
  double beta = 0;
  int state_index = 0;
  std::optional<double> energy;  // absent state
};

/// For every L the lowest `states` energies; missing states keep an empty
/// energy so the table stays rectangular.
inline std::vector<ConvergenceRow> convergence_sweep(
    const Params& p, const std::vector<int>& L_list, ScanConfig cfg,
    int states = 2) {
  std::vector<ConvergenceRow> rows;
  for (int L : L_list) {
    cfg.L = L;
    // the lowest `states` levels overall come from the lowest `states` of
    // each sector
    if (cfg.max_roots_per_sector < 0 || cfg.max_roots_per_sector > states)
      cfg.max_roots_per_sector = states;
    SpectrumTable t = spectrum(p, cfg);
    for (int i = 0; i < states; ++i) {
      ConvergenceRow r{L, p.beta, i, std::nullopt};
      if (i < static_cast<int>(t.states.size())) r.energy = t.states[i].energy;
      rows.push_back(r);
    }
  }
  return rows;
}

struct SweepRow {
  double beta = 0;
  int state_index = 0;
  Parity parity = Parity::even;
  double energy = 0;
  double upper_bound = 0;
};

/// Spectrum at each beta, long format. A state index present at one beta
/// and missing at the next has crossed the upper bound.
inline std::vector<SweepRow> beta_sweep(double v0,
                                        const std::vector<double>& betas,
                                        const ScanConfig& cfg) {
  std::vector<SweepRow> rows;
  for (double beta : betas) {
    Params p = Params::make(beta, v0);
    SpectrumTable t = spectrum(p, cfg);
    const double bound = energy_upper_bound<double>(p);
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      rows.push_back({beta, static_cast<int>(i), t.states[i].parity,
                      t.states[i].energy, bound});
    }
  }
  return rows;
}

/// n equally spaced values from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n <= 0) return g;
  if (n == 1) return {lo};
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace neqm
