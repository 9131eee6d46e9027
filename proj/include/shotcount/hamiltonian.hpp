#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <unordered_map>
#include <vector>

#include "shotcount/errors.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

/// Hermitian qubit operator as a combined Pauli sum. The identity
/// coefficient is kept apart in identity_offset; terms hold distinct
/// non-identity strings with real coefficients.
struct QubitHamiltonian {
  std::size_t n_qubits = 0;
  std::vector<PauliTerm> terms;
  double identity_offset = 0.0;

  double coefficient_one_norm() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::abs(t.coefficient);
    return s;
  }
};

/// Order-independent accumulator for building Pauli sums. Coefficients are
/// complex while accumulating; finalization asserts the imaginary parts
/// cancelled and prunes numerical noise.
class PauliAccumulator {
 public:
  explicit PauliAccumulator(std::size_t n_qubits) : n_(n_qubits) {}

  std::size_t n_qubits() const { return n_; }

  void add(const PauliString& p, std::complex<double> c) {
    map_[p] += c;
  }

  void add(const QubitHamiltonian& h, std::complex<double> scale = 1.0) {
    add(PauliString(n_), h.identity_offset * scale);
    for (const auto& t : h.terms) add(t.pauli, t.coefficient * scale);
  }

  /// Accumulates scale * (this sum so far is untouched) -- product of two
  /// existing sums a*b, term by term through the exact Pauli algebra.
  static PauliAccumulator product(const PauliAccumulator& a,
                                  const PauliAccumulator& b) {
    PauliAccumulator out(a.n_);
    for (const auto& [pa, ca] : a.map_) {
      if (std::abs(ca) < 1e-15) continue;
      for (const auto& [pb, cb] : b.map_) {
        if (std::abs(cb) < 1e-15) continue;
        auto [phase, pr] = pa.product(pb);
        out.map_[pr] += ca * cb * phase;
      }
    }
    return out;
  }

  const std::unordered_map<PauliString, std::complex<double>, PauliStringHash>&
  raw() const {
    return map_;
  }

  /// Collapses into a Hermitian Hamiltonian: imaginary parts must be below
  /// imag_tol, coefficients below combine_threshold are dropped, terms are
  /// sorted canonically for cross-platform determinism.
  QubitHamiltonian finalize(double combine_threshold = 1e-12,
                            double imag_tol = 1e-10) const {
    QubitHamiltonian h;
    h.n_qubits = n_;
    for (const auto& [p, c] : map_) {
      if (std::abs(c.imag()) > imag_tol)
        throw consistency_error(
            "pauli sum: residual imaginary coefficient " +
            std::to_string(c.imag()) + " on " + p.to_string());
      if (p.is_identity()) {
        h.identity_offset += c.real();
        continue;
      }
      if (std::abs(c.real()) < combine_threshold) continue;
      h.terms.push_back({p, c.real()});
    }
    std::sort(h.terms.begin(), h.terms.end(),
              [](const PauliTerm& a, const PauliTerm& b) {
                return a.pauli.canonical_less(b.pauli);
              });
    return h;
  }

 private:
  std::size_t n_;
  std::unordered_map<PauliString, std::complex<double>, PauliStringHash> map_;
};

/// Exact symbolic product of two Hermitian Pauli sums.
inline PauliAccumulator hamiltonian_product(const QubitHamiltonian& a,
                                            const QubitHamiltonian& b) {
  PauliAccumulator pa(a.n_qubits), pb(b.n_qubits);
  pa.add(a);
  pb.add(b);
  return PauliAccumulator::product(pa, pb);
}

}  // namespace shotcount
