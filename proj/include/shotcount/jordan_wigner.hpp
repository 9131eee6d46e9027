#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"
#include "shotcount/fcidump.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

struct WeightedPauli {
  PauliString pauli;
  std::complex<double> weight;
};

/// Spin-orbital index for the interleaved map: alpha spins on even qubits,
/// beta spins on odd qubits, spatial order as given in the integral file.
inline std::size_t spin_orbital_qubit(std::size_t spatial, int spin) {
  return 2 * spatial + static_cast<std::size_t>(spin);
}

/// Jordan-Wigner ladder operator on spin-orbital p:
///   a_p   = Z_0..Z_{p-1} (X_p + i Y_p)/2   (annihilation, +i)
///   a†_p  = Z_0..Z_{p-1} (X_p - i Y_p)/2   (creation, -i)
inline std::vector<WeightedPauli> jw_ladder(std::size_t p, bool dagger,
                                            std::size_t n_qubits) {
  if (p >= n_qubits)
    throw precondition_error("jw_ladder: index out of range");
  PauliString base(n_qubits);
  for (std::size_t q = 0; q < p; ++q) base.set_letter(q, 'Z');
  PauliString px = base, py = base;
  px.set_letter(p, 'X');
  py.set_letter(p, 'Y');
  const std::complex<double> iy =
      dagger ? std::complex<double>(0, -0.5) : std::complex<double>(0, 0.5);
  return {{px, {0.5, 0.0}}, {py, iy}};
}

namespace detail {

/// Accumulates coeff * op1 * op2 * ... for a product of ladder operators.
inline void accumulate_ladder_product(
    PauliAccumulator& acc, std::complex<double> coeff,
    const std::vector<std::pair<std::size_t, bool>>& ops,
    std::size_t n_qubits) {
  std::vector<WeightedPauli> prod = {
      {PauliString(n_qubits), {1.0, 0.0}}};
  for (const auto& [p, dagger] : ops) {
    const auto ladder = jw_ladder(p, dagger, n_qubits);
    std::vector<WeightedPauli> next;
    next.reserve(prod.size() * 2);
    for (const auto& a : prod)
      for (const auto& b : ladder) {
        auto [phase, r] = a.pauli.product(b.pauli);
        next.push_back({r, a.weight * b.weight * phase});
      }
    prod = std::move(next);
  }
  for (const auto& wp : prod) acc.add(wp.pauli, coeff * wp.weight);
}

}  // namespace detail

/// JW image of a spin-summed one-body operator sum_pq m_pq a†_p a_q over a
/// spatial matrix m (both spins, interleaved map).
inline PauliAccumulator jw_one_body(const Eigen::MatrixXd& m,
                                    std::size_t n_qubits) {
  const auto n = static_cast<std::size_t>(m.rows());
  PauliAccumulator acc(n_qubits);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (m(p, q) == 0.0) continue;
      for (int spin = 0; spin < 2; ++spin)
        detail::accumulate_ladder_product(
            acc, m(p, q),
            {{spin_orbital_qubit(p, spin), true},
             {spin_orbital_qubit(q, spin), false}},
            n_qubits);
    }
  return acc;
}

/// Full Jordan-Wigner encoding of the molecular Hamiltonian
///   H = sum h_pq a†_p a_q + 1/2 sum (pq|rs) a†_p a†_r a_s a_q + E_nuc
/// expanded over spin-orbitals with the interleaved alpha/beta map.
inline QubitHamiltonian jordan_wigner(const MolecularIntegrals& mi) {
  mi.validate();
  const std::size_t n = mi.n_spatial_orbitals;
  const std::size_t nq = 2 * n;
  PauliAccumulator acc(nq);
  acc.add(PauliString(nq), mi.nuclear_repulsion);

  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      if (mi.one_body(p, q) == 0.0) continue;
      for (int spin = 0; spin < 2; ++spin)
        detail::accumulate_ladder_product(
            acc, mi.one_body(p, q),
            {{spin_orbital_qubit(p, spin), true},
             {spin_orbital_qubit(q, spin), false}},
            nq);
    }

  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const double v = mi.eri(p, q, r, s);
          if (v == 0.0) continue;
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
              detail::accumulate_ladder_product(
                  acc, 0.5 * v,
                  {{spin_orbital_qubit(p, s1), true},
                   {spin_orbital_qubit(r, s2), true},
                   {spin_orbital_qubit(s, s2), false},
                   {spin_orbital_qubit(q, s1), false}},
                  nq);
        }
  return acc.finalize();
}

}  // namespace shotcount
