#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "shotcount/errors.hpp"
#include "shotcount/estimator.hpp"

namespace shotcount {

/// Power-law model K(N) = a * N^b, fit in log-log space.
struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double rms_log_residual = 0.0;
};

struct ScalingPoint {
  double n_qubits = 0.0;
  double k = 0.0;
};

/// Ordinary least squares on (ln N, ln K). Needs at least two points with
/// distinct sizes; every K must be positive for the log transform.
inline ScalingFit fit_power_law(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2)
    throw precondition_error("fit_power_law: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    if (p.n_qubits <= 0.0 || p.k <= 0.0)
      throw precondition_error(
          "fit_power_law: sizes and K values must be positive");
    const double x = std::log(p.n_qubits);
    const double y = std::log(p.k);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(points.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12 * n * sxx || denom == 0.0)
    throw precondition_error("fit_power_law: degenerate sizes");
  ScalingFit fit;
  fit.b = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.b * sx) / n;
  fit.a = std::exp(intercept);
  double ss = 0.0;
  for (const auto& p : points) {
    const double r =
        std::log(p.k) - (intercept + fit.b * std::log(p.n_qubits));
    ss += r * r;
  }
  fit.rms_log_residual = std::sqrt(ss / n);
  return fit;
}

inline double extrapolate_k(const ScalingFit& fit, double n_qubits) {
  if (n_qubits <= 0.0)
    throw precondition_error("extrapolate_k: size must be positive");
  return fit.a * std::pow(n_qubits, fit.b);
}

/// Resource heuristic: about 13 qubits per electron at the basis-set
/// frontier of interest.
inline std::size_t qubit_count(std::size_t n_electrons) {
  return 13 * n_electrons;
}

/// Wall-clock estimate: 100 ns per circuit layer, depth 5 N_q - 3 per shot.
inline double runtime_seconds(double measurements, std::size_t n_qubits) {
  if (measurements < 0.0)
    throw precondition_error("runtime_seconds: negative measurement count");
  return 1e-7 * measurements * double(5 * n_qubits - 3);
}

struct MoleculeRow {
  std::string molecule;
  std::size_t n_electrons = 0;
  double a = 0.0;
  double b = 0.0;
};

struct RuntimeEstimate {
  std::string molecule;
  std::size_t n_electrons = 0;
  std::size_t n_qubits = 0;
  double k = 0.0;          // Hartree^2
  double measurements = 0.0;
  double t_seconds = 0.0;
  double t_days = 0.0;
};

/// Full extrapolation pipeline: per molecule, N_q = 13 N_el,
/// K = a N_q^b, M = K / (rdmc_factor eps^2), t = 1e-7 M (5 N_q - 3).
inline std::vector<RuntimeEstimate> table2_pipeline(
    const std::vector<MoleculeRow>& rows, double epsilon,
    double rdmc_factor = 2.0) {
  std::vector<RuntimeEstimate> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.n_electrons == 0)
      throw precondition_error("table2_pipeline: zero electrons for " +
                               r.molecule);
    RuntimeEstimate e;
    e.molecule = r.molecule;
    e.n_electrons = r.n_electrons;
    e.n_qubits = qubit_count(r.n_electrons);
    e.k = extrapolate_k({r.a, r.b, 0.0}, double(e.n_qubits));
    e.measurements = measurement_count(e.k, epsilon, rdmc_factor);
    e.t_seconds = runtime_seconds(e.measurements, e.n_qubits);
    e.t_days = e.t_seconds / 86400.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace shotcount
