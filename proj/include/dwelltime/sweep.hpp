#pragma once

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dwelltime/config.hpp"
#include "dwelltime/dwell.hpp"
#include "dwelltime/operational.hpp"

namespace dwelltime {

// A CSV dataset: '#' comment lines, one header line naming every column with
// its unit in brackets, then numeric rows.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// 12 significant digits, '.' decimal point regardless of locale.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

inline void write_csv(std::ostream& out, const Table& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
}

inline std::string to_csv(const Table& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

namespace detail {

inline std::string number_label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

inline std::string laser_label(const LaserSetting& s) {
  return "D" + number_label(s.delta_over_gamma) + "g_O" + number_label(s.omega_over_gamma) + "g";
}

inline bool si(const SweepConfig& cfg) { return cfg.units == UnitSystem::si; }

inline std::string time_unit(const SweepConfig& cfg) { return si(cfg) ? "[s]" : "[natural]"; }

inline std::vector<std::string> common_comments(const SweepConfig& cfg, const std::string& what) {
  std::vector<std::string> c;
  c.push_back("dwelltime " + what);
  c.push_back("particle=" + cfg.particle.label + " mass=" + format_number(cfg.particle.mass) +
              (si(cfg) ? " kg" : "") + " region_length=" + format_number(cfg.region_length) +
              (si(cfg) ? " m" : "") + " barrier_height=" + format_number(cfg.barrier_height) +
              (si(cfg) ? " J" : ""));
  if (si(cfg))
    c.push_back("gamma=" + format_number(cfg.gamma) + " 1/s wavelength=" +
                format_number(cfg.wavelength) + " m convention=" + to_string(cfg.convention));
  return c;
}

}  // namespace detail

inline PiecewisePotential physical_barrier(const SweepConfig& cfg) {
  if (cfg.barrier_height == 0.0) return PiecewisePotential::free(cfg.region());
  return PiecewisePotential::square_barrier(cfg.region(), cfg.barrier_height);
}

// The velocity grid, plus for a free particle the exact degeneracy points
// pl/hbar = n pi that fall inside it.
inline std::vector<double> eigen_velocities(const SweepConfig& cfg) {
  std::vector<double> v = cfg.velocity_grid();
  if (cfg.barrier_height != 0.0) return v;
  const double step = std::numbers::pi * cfg.constants.hbar / (cfg.particle.mass * cfg.region_length);
  for (int n = 1; n * step <= cfg.velocity_max; ++n)
    if (n * step >= cfg.velocity_min) v.push_back(n * step);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Closed-form t+ / t- over the velocity grid.
inline Table eigen_table(const SweepConfig& cfg) {
  Table t;
  t.comments = detail::common_comments(cfg, "eigen");
  const std::string tu = detail::time_unit(cfg);
  t.columns = {"velocity[" + cfg.velocity_unit + "]",
               std::string("momentum") + (detail::si(cfg) ? "[kg*m/s]" : "[natural]"),
               "t_plus" + tu, "t_minus" + tu, "average" + tu};
  if (detail::si(cfg)) {
    for (const char* name : {"t_plus", "t_minus", "average"})
      t.columns.push_back(std::string(name) + "[1/gamma]");
  }
  t.columns.push_back("splitting_ratio[1]");

  const bool free = cfg.barrier_height == 0.0;
  for (double v : eigen_velocities(cfg)) {
    const double p = cfg.particle.mass * v;
    const DwellPair pair =
        free ? free_dwell_eigenvalues(p, cfg.region_length, cfg.particle.mass, cfg.constants)
             : barrier_dwell_eigenvalues(p, cfg.region_length, cfg.barrier_height,
                                         cfg.particle.mass, cfg.constants);
    const double avg = average_dwell(pair);
    std::vector<double> row{v / cfg.velocity_scale, p, pair.t_plus, pair.t_minus, avg};
    if (detail::si(cfg)) {
      row.push_back(pair.t_plus * cfg.gamma);
      row.push_back(pair.t_minus * cfg.gamma);
      row.push_back(avg * cfg.gamma);
    }
    row.push_back(splitting_ratio(pair.t_plus, pair.t_minus));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct SweepRow {
  double velocity = 0.0;      // internal units
  double exact_dwell = 0.0;   // with the physical barrier (plus the base light shift in plus mode)
  std::vector<EstimatorReport> per_laser;
};

// Rows of (velocity, exact dwell, estimator per laser setting).
struct SweepResult {
  std::vector<SweepRow> rows;
};

inline SweepResult fig1_sweep(const SweepConfig& cfg) {
  const PiecewisePotential barrier = physical_barrier(cfg);
  SweepResult result;
  for (double v : cfg.velocity_grid()) {
    const double p = cfg.particle.mass * v;
    SweepRow row;
    row.velocity = v;
    for (const LaserSetting& s : cfg.lasers) {
      row.per_laser.push_back(estimator_report(barrier, p, cfg.particle.mass, cfg.laser(s),
                                               cfg.convention, cfg.constants));
    }
    row.exact_dwell = row.per_laser.front().exact_dwell;
    result.rows.push_back(std::move(row));
  }
  return result;
}

inline Table fig1_table(const SweepConfig& cfg, const SweepResult& sweep) {
  Table t;
  t.comments = detail::common_comments(cfg, "fig1");
  const bool plus = cfg.convention == LightShiftConvention::barrier_plus_lightshift;
  t.columns.push_back("velocity[" + cfg.velocity_unit + "]");
  auto paired = [&](const std::string& name) {
    t.columns.push_back(name + detail::time_unit(cfg));
    if (detail::si(cfg)) t.columns.push_back(name + "[1/gamma]");
  };
  if (!plus) paired("exact_dwell");
  for (const LaserSetting& s : cfg.lasers) {
    if (plus) paired("exact_dwell_" + detail::laser_label(s));
    paired("tau_approx_" + detail::laser_label(s));
  }
  for (const SweepRow& r : sweep.rows) {
    std::vector<double> row{r.velocity / cfg.velocity_scale};
    auto push = [&](double time) {
      row.push_back(time);
      if (detail::si(cfg)) row.push_back(time * cfg.gamma);
    };
    if (!plus) push(r.exact_dwell);
    for (const EstimatorReport& e : r.per_laser) {
      if (plus) push(e.exact_dwell);
      push(e.tau_approx);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct DwellPeak {
  double velocity;
  double exact_dwell;
};

// Global maximum of the exact average dwell on the velocity grid, evaluated on
// the real potential the first laser setting sees under the configured convention.
inline DwellPeak locate_dwell_peak(const SweepConfig& cfg) {
  const PiecewisePotential real_part = exact_potential(
      physical_barrier(cfg), cfg.laser(cfg.lasers.front()), cfg.convention, cfg.constants);
  DwellPeak best{0.0, -1.0};
  for (double v : cfg.velocity_grid()) {
    const double p = cfg.particle.mass * v;
    const double avg =
        at_regular_momentum(p, [&](double q) {
          return dwell_matrix(real_part, q, cfg.particle.mass, cfg.constants);
        }).average;
    if (avg > best.exact_dwell) best = {v, avg};
  }
  return best;
}

struct AbsorptionSweepRow {
  double scale;  // V_I / V_I(base laser)
  LaserParams laser;
  EstimatorReport report;
};

// At the dwell peak, scales the first laser setting so that V_I sweeps a log
// grid of dwell/delay ratios while V_R stays fixed (Delta -> Delta/s,
// Omega -> Omega/sqrt(s)). Rows are sorted by ascending absorption.
inline std::vector<AbsorptionSweepRow> fig2_sweep(const SweepConfig& cfg, const DwellPeak& peak) {
  const PiecewisePotential barrier = physical_barrier(cfg);
  const LaserParams base = cfg.laser(cfg.lasers.front());
  const double base_v_imag = effective_potential(base, cfg.constants).v_imag;
  const double p = cfg.particle.mass * peak.velocity;
  std::vector<AbsorptionSweepRow> rows;
  for (std::size_t i = 0; i < cfg.fig2_points; ++i) {
    const double ratio =
        cfg.fig2_ratio_min * std::pow(cfg.fig2_ratio_max / cfg.fig2_ratio_min,
                                      static_cast<double>(i) /
                                          static_cast<double>(cfg.fig2_points - 1));
    // dwell/delay = 2 V_I tau / hbar
    const double v_imag = ratio * cfg.constants.hbar / (2.0 * peak.exact_dwell);
    const double s = v_imag / base_v_imag;
    LaserParams laser = base;
    laser.delta = base.delta / s;
    laser.omega = base.omega / std::sqrt(s);
    rows.push_back({s, laser,
                    estimator_report(barrier, p, cfg.particle.mass, laser, cfg.convention,
                                     cfg.constants)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.report.absorption < b.report.absorption;
  });
  return rows;
}

inline Table fig2_table(const SweepConfig& cfg, const DwellPeak& peak,
                        const std::vector<AbsorptionSweepRow>& sweep) {
  Table t;
  t.comments = detail::common_comments(cfg, "fig2");
  t.comments.push_back("peak velocity=" + format_number(peak.velocity / cfg.velocity_scale) +
                       " " + cfg.velocity_unit + " exact_dwell=" + format_number(peak.exact_dwell) +
                       (detail::si(cfg) ? " s" : ""));
  t.comments.push_back("base laser " + detail::laser_label(cfg.lasers.front()) +
                       " scaled as Delta/s, Omega/sqrt(s)");
  const std::string tu = detail::time_unit(cfg);
  const bool si = detail::si(cfg);
  t.columns = {"absorption[1]", "relative_error[1]", "dwell_over_delay[1]",
               std::string("v_imag") + (si ? "[J]" : "[natural]"), "tau_approx" + tu};
  if (si) t.columns.push_back("tau_approx[1/gamma]");
  t.columns.push_back("delay" + tu);
  if (si) t.columns.push_back("delay[1/gamma]");
  t.columns.push_back("scale[1]");
  t.columns.push_back("single_photon[bool]");
  for (const auto& r : sweep) {
    const EstimatorReport& e = r.report;
    std::vector<double> row{e.absorption, e.relative_error, e.dwell_over_delay, e.v_imag,
                            e.tau_approx};
    if (si) row.push_back(e.tau_approx * cfg.gamma);
    row.push_back(e.delay);
    if (si) row.push_back(e.delay * cfg.gamma);
    row.push_back(r.scale);
    row.push_back(e.dwell_over_delay < cfg.single_photon_threshold ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace dwelltime
