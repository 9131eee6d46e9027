#pragma once

#include <random>
#include <string>
#include <unordered_set>

#include "shotcount/fcidump.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/pauli.hpp"

namespace testhelp {

inline std::string data_path(const std::string& name) {
  return std::string(SHOTCOUNT_DATA_DIR) + "/" + name;
}

inline shotcount::PauliString random_pauli(std::mt19937_64& rng,
                                           std::size_t n_qubits) {
  shotcount::PauliString p(n_qubits);
  std::uniform_int_distribution<int> letter(0, 3);
  static const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (std::size_t q = 0; q < n_qubits; ++q)
    p.set_letter(q, letters[letter(rng)]);
  return p;
}

inline shotcount::QubitHamiltonian random_hamiltonian(std::mt19937_64& rng,
                                                      std::size_t n_qubits,
                                                      std::size_t n_terms) {
  shotcount::QubitHamiltonian h;
  h.n_qubits = n_qubits;
  std::unordered_set<shotcount::PauliString, shotcount::PauliStringHash> seen;
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  while (h.terms.size() < n_terms) {
    auto p = random_pauli(rng, n_qubits);
    if (p.is_identity() || seen.count(p)) continue;
    seen.insert(p);
    double c = coeff(rng);
    if (c == 0.0) c = 0.5;
    h.terms.push_back({p, c});
  }
  return h;
}

/// Random integrals with exact chemist 8-fold symmetry (averaging trick).
inline shotcount::MolecularIntegrals random_integrals(std::mt19937_64& rng,
                                                      std::size_t n,
                                                      std::size_t n_electrons) {
  shotcount::MolecularIntegrals mi;
  mi.n_spatial_orbitals = n;
  mi.n_electrons = n_electrons;
  mi.two_m_s = 0;
  mi.nuclear_repulsion = 0.3;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) m(p, q) = u(rng);
  mi.one_body = 0.5 * (m + m.transpose());
  mi.two_body.assign(n * n * n * n, 0.0);
  std::vector<double> raw(n * n * n * n);
  for (auto& v : raw) v = u(rng);
  auto at = [&](std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
    return raw[((p * n + q) * n + r) * n + s];
  };
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
          mi.eri(p, q, r, s) =
              (at(p, q, r, s) + at(q, p, r, s) + at(p, q, s, r) +
               at(q, p, s, r) + at(r, s, p, q) + at(s, r, p, q) +
               at(r, s, q, p) + at(s, r, q, p)) /
              8.0;
  return mi;
}

}  // namespace testhelp
