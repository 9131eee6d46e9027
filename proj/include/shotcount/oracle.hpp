#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

/// Qubit q maps to bit q of the amplitude index (qubit 0 least significant).
struct Statevector {
  std::size_t n_qubits = 0;
  Eigen::VectorXcd amplitudes;

  void check_normalized(double tol = 1e-10) const {
    if (std::abs(amplitudes.norm() - 1.0) > tol)
      throw consistency_error("statevector: not normalized");
  }
};

namespace detail {

constexpr std::size_t kDenseQubitGuard = 14;

inline void check_size_guard(std::size_t n) {
  if (n > kDenseQubitGuard)
    throw precondition_error("oracle: " + std::to_string(n) +
                             " qubits exceeds the dense guard (" +
                             std::to_string(kDenseQubitGuard) + ")");
}

inline std::uint64_t mask64(const PauliString& p, bool z) {
  std::uint64_t m = 0;
  for (std::size_t q = 0; q < p.n_qubits(); ++q) {
    const char c = p.letter(q);
    const bool hit = z ? (c == 'Z' || c == 'Y') : (c == 'X' || c == 'Y');
    if (hit) m |= std::uint64_t(1) << q;
  }
  return m;
}

}  // namespace detail

/// Matrix-free action of a Pauli string on an amplitude vector.
inline Eigen::VectorXcd apply_pauli(const PauliString& p,
                                    const Eigen::VectorXcd& amps) {
  const std::size_t n = p.n_qubits();
  detail::check_size_guard(n);
  if (amps.size() != (Eigen::Index(1) << n))
    throw precondition_error("apply_pauli: dimension mismatch");
  const std::uint64_t xm = detail::mask64(p, false);
  const std::uint64_t zm = detail::mask64(p, true);
  std::size_t ny = 0;
  for (std::size_t q = 0; q < n; ++q)
    if (p.letter(q) == 'Y') ++ny;
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> ybase = ipow[ny % 4];

  Eigen::VectorXcd out(amps.size());
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(amps.size()); ++j) {
    const int sign = (__builtin_popcountll(j & zm) & 1) ? -1 : 1;
    out[j ^ xm] = ybase * double(sign) * amps[j];
  }
  return out;
}

inline Eigen::VectorXcd apply_hamiltonian(const QubitHamiltonian& h,
                                          const Eigen::VectorXcd& amps) {
  Eigen::VectorXcd out = h.identity_offset * amps;
  for (const auto& t : h.terms)
    out += t.coefficient * apply_pauli(t.pauli, amps);
  return out;
}

inline double expectation(const PauliString& p, const Statevector& s) {
  if (p.n_qubits() != s.n_qubits)
    throw precondition_error("expectation: dimension mismatch");
  const std::complex<double> v =
      s.amplitudes.dot(apply_pauli(p, s.amplitudes));
  if (std::abs(v.imag()) > 1e-10)
    throw consistency_error("expectation: non-real value");
  return v.real();
}

inline double expectation(const QubitHamiltonian& h, const Statevector& s) {
  if (h.n_qubits != s.n_qubits)
    throw precondition_error("expectation: dimension mismatch");
  const std::complex<double> v =
      s.amplitudes.dot(apply_hamiltonian(h, s.amplitudes));
  if (std::abs(v.imag()) > 1e-10)
    throw consistency_error("expectation: non-real value");
  return v.real();
}

/// Exact 2^n x 2^n realization (columns built from the matrix-free action).
inline Eigen::MatrixXcd dense_matrix(const PauliString& p) {
  detail::check_size_guard(p.n_qubits());
  const Eigen::Index dim = Eigen::Index(1) << p.n_qubits();
  Eigen::MatrixXcd m(dim, dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e[c] = 1.0;
    m.col(c) = apply_pauli(p, e);
    e[c] = 0.0;
  }
  return m;
}

inline Eigen::MatrixXcd dense_matrix(const QubitHamiltonian& h) {
  detail::check_size_guard(h.n_qubits);
  const Eigen::Index dim = Eigen::Index(1) << h.n_qubits;
  Eigen::MatrixXcd m =
      h.identity_offset * Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& t : h.terms)
    m += t.coefficient * dense_matrix(t.pauli);
  return m;
}

namespace detail {

/// Global-phase convention: first amplitude above threshold made real
/// positive; keeps degenerate/regression cases stable.
inline void fix_phase(Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-9) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
  }
}

/// Lanczos with full reorthogonalization; used above the dense cutoff.
inline std::pair<double, Eigen::VectorXcd> lanczos_ground(
    const QubitHamiltonian& h) {
  const Eigen::Index dim = Eigen::Index(1) << h.n_qubits;
  const int max_iter = 400;
  std::mt19937_64 rng(0x5eed5eedULL);
  Eigen::VectorXcd q0(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double a = (rng() >> 11) * 0x1.0p-53 - 0.5;
    const double b = (rng() >> 11) * 0x1.0p-53 - 0.5;
    q0[i] = {a, b};
  }
  q0.normalize();
  std::vector<Eigen::VectorXcd> basis = {q0};
  std::vector<double> alpha, beta;
  double prev_e = 1e300;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXcd w = apply_hamiltonian(h, basis.back());
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    for (const auto& q : basis) w -= q.dot(w) * q;
    for (const auto& q : basis) w -= q.dot(w) * q;  // second pass
    const double b = w.norm();
    // tridiagonal eigenproblem
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double e = es.eigenvalues()(0);
    if (b < 1e-12 || (it > 10 && std::abs(e - prev_e) < 1e-13)) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      for (int i = 0; i < m; ++i) v += es.eigenvectors()(i, 0) * basis[i];
      v.normalize();
      return {e, v};
    }
    prev_e = e;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw consistency_error("lanczos: no convergence after 400 iterations");
}

}  // namespace detail

/// Lowest eigenpair of the dense realization. Dense solve below 11 qubits,
/// matrix-free Lanczos up to the 14-qubit guard.
inline std::pair<double, Statevector> ground_state(const QubitHamiltonian& h) {
  detail::check_size_guard(h.n_qubits);
  Statevector s;
  s.n_qubits = h.n_qubits;
  if (h.terms.empty()) {
    s.amplitudes = Eigen::VectorXcd::Zero(Eigen::Index(1) << h.n_qubits);
    s.amplitudes[0] = 1.0;
    return {h.identity_offset, s};
  }
  if (h.n_qubits <= 10) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
    s.amplitudes = es.eigenvectors().col(0);
    detail::fix_phase(s.amplitudes);
    return {es.eigenvalues()(0), s};
  }
  auto [e, v] = detail::lanczos_ground(h);
  detail::fix_phase(v);
  s.amplitudes = std::move(v);
  return {e, s};
}

struct SamplingReport {
  std::uint64_t total_shots = 0;
  std::vector<std::uint64_t> per_group_shots;
  double energy_estimate = 0.0;   // Hartree
  double empirical_variance = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline void apply_single_qubit(Eigen::VectorXcd& amps, std::size_t q,
                               const Eigen::Matrix2cd& g) {
  const std::uint64_t bit = std::uint64_t(1) << q;
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(amps.size()); ++j) {
    if (j & bit) continue;
    const std::complex<double> a0 = amps[j];
    const std::complex<double> a1 = amps[j | bit];
    amps[j] = g(0, 0) * a0 + g(0, 1) * a1;
    amps[j | bit] = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

}  // namespace detail

/// Shot-sampling simulator for plans with per-qubit measurement bases
/// (QWC or singleton). Per group: rotate into the group basis, draw
/// bitstrings from |amplitude|^2 with a seeded mt19937_64 (documented,
/// standard-specified, cross-platform deterministic), score every member
/// Pauli as the +-1 product over its support, and combine the group means.
/// empirical_variance is the allocation-weighted variance of the energy
/// estimator computed from the same samples.
inline SamplingReport sample_plan(const QubitHamiltonian& h,
                                  const GroupingPlan& plan,
                                  const Statevector& s,
                                  const std::vector<std::uint64_t>& allocation,
                                  std::uint64_t seed) {
  if (plan.method != GroupingMethod::qwc &&
      plan.method != GroupingMethod::none)
    throw precondition_error(
        "sample_plan: plan method '" + to_string(plan.method) +
        "' has no per-qubit measurement bases; sampling unsupported");
  if (h.n_qubits != s.n_qubits)
    throw precondition_error("sample_plan: dimension mismatch");
  if (allocation.size() != plan.groups.size())
    throw precondition_error("sample_plan: allocation size mismatch");
  validate_partition(h, plan);
  s.check_normalized();

  Eigen::Matrix2cd had, yrot;
  had << 1, 1, 1, -1;
  had /= std::sqrt(2.0);
  Eigen::Matrix2cd sdag;
  sdag << 1, 0, 0, std::complex<double>(0, -1);
  yrot = had * sdag;  // maps Y eigenbasis onto the computational basis

  SamplingReport rep;
  rep.seed = seed;
  rep.per_group_shots = allocation;
  rep.energy_estimate = h.identity_offset;

  for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
    const Group& g = plan.groups[gi];
    const std::uint64_t shots = allocation[gi];
    double one_norm = 0.0;
    for (std::size_t idx : g.term_indices)
      one_norm += std::abs(h.terms[idx].coefficient);
    if (shots == 0) {
      if (one_norm > 1e-15)
        throw precondition_error(
            "sample_plan: group " + std::to_string(gi) +
            " has nonzero coefficients but zero allocated shots");
      continue;
    }

    Eigen::VectorXcd amps = s.amplitudes;
    for (std::size_t q = 0; q < h.n_qubits; ++q) {
      const char b = g.measurement_basis[q];
      if (b == 'X') detail::apply_single_qubit(amps, q, had);
      if (b == 'Y') detail::apply_single_qubit(amps, q, yrot);
    }
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (Eigen::Index j = 0; j < amps.size(); ++j) {
      acc += std::norm(amps[j]);
      cdf[static_cast<std::size_t>(j)] = acc;
    }

    std::vector<std::uint64_t> supports;
    supports.reserve(g.term_indices.size());
    for (std::size_t idx : g.term_indices) {
      std::uint64_t sup = 0;
      for (std::size_t q = 0; q < h.n_qubits; ++q)
        if (h.terms[idx].pauli.letter(q) != 'I')
          sup |= std::uint64_t(1) << q;
      supports.push_back(sup);
    }

    std::mt19937_64 rng(detail::splitmix64(seed ^ (0xabcd1234ULL + gi)));
    std::vector<double> member_sum(g.term_indices.size(), 0.0);
    double gsum = 0.0, gsumsq = 0.0;
    for (std::uint64_t t = 0; t < shots; ++t) {
      const double u = (rng() >> 11) * 0x1.0p-53 * acc;
      const std::uint64_t j = std::min<std::uint64_t>(
          static_cast<std::uint64_t>(
              std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
          cdf.size() - 1);
      double gval = 0.0;
      for (std::size_t m = 0; m < supports.size(); ++m) {
        const int o = (__builtin_popcountll(j & supports[m]) & 1) ? -1 : 1;
        member_sum[m] += o;
        gval += h.terms[g.term_indices[m]].coefficient * o;
      }
      gsum += gval;
      gsumsq += gval * gval;
    }
    for (std::size_t m = 0; m < supports.size(); ++m)
      rep.energy_estimate += h.terms[g.term_indices[m]].coefficient *
                             member_sum[m] / double(shots);
    if (shots >= 2) {
      const double var =
          (gsumsq - gsum * gsum / double(shots)) / double(shots - 1);
      rep.empirical_variance += var / double(shots);
    }
    rep.total_shots += shots;
  }
  return rep;
}

}  // namespace shotcount
