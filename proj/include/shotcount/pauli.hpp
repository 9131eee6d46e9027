#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shotcount/errors.hpp"

namespace shotcount {

/// Multi-qubit Pauli operator in symplectic (bit-mask) form.
///
/// Qubit q carries I/X/Y/Z iff (x_bit, z_bit) is (0,0)/(1,0)/(1,1)/(0,1).
/// The masks are stored 64 qubits per word so the commutation predicates
/// are a handful of word operations.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::size_t n_qubits)
      : n_(n_qubits), x_(words(n_qubits), 0), z_(words(n_qubits), 0) {}

  /// Parses the canonical text form ("XIZY..."), qubit 0 first.
  static PauliString from_text(const std::string& s) {
    if (s.empty()) throw input_error("pauli: empty string");
    PauliString p(s.size());
    for (std::size_t q = 0; q < s.size(); ++q) {
      switch (s[q]) {
        case 'I':
          break;
        case 'X':
          p.set_bit(p.x_, q);
          break;
        case 'Y':
          p.set_bit(p.x_, q);
          p.set_bit(p.z_, q);
          break;
        case 'Z':
          p.set_bit(p.z_, q);
          break;
        default:
          throw input_error("pauli: invalid character '" +
                            std::string(1, s[q]) + "' at position " +
                            std::to_string(q));
      }
    }
    return p;
  }

  std::size_t n_qubits() const { return n_; }

  char letter(std::size_t q) const {
    const bool x = get_bit(x_, q);
    const bool z = get_bit(z_, q);
    if (x && z) return 'Y';
    if (x) return 'X';
    if (z) return 'Z';
    return 'I';
  }

  void set_letter(std::size_t q, char c) {
    clear_bit(x_, q);
    clear_bit(z_, q);
    if (c == 'X' || c == 'Y') set_bit(x_, q);
    if (c == 'Z' || c == 'Y') set_bit(z_, q);
  }

  std::string to_string() const {
    std::string s(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) s[q] = letter(q);
    return s;
  }

  bool is_identity() const {
    for (std::size_t w = 0; w < x_.size(); ++w)
      if (x_[w] != 0 || z_[w] != 0) return false;
    return true;
  }

  bool is_z_only() const {
    for (std::uint64_t w : x_)
      if (w != 0) return false;
    return true;
  }

  /// Number of non-identity single-qubit factors.
  std::size_t weight() const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < x_.size(); ++w)
      c += popcount(x_[w] | z_[w]);
    return c;
  }

  /// True iff on every qubit the factors are equal or one is identity.
  bool qubit_wise_commutes(const PauliString& o) const {
    check_dims(o);
    for (std::size_t w = 0; w < x_.size(); ++w) {
      const std::uint64_t both = (x_[w] | z_[w]) & (o.x_[w] | o.z_[w]);
      const std::uint64_t differ = (x_[w] ^ o.x_[w]) | (z_[w] ^ o.z_[w]);
      if (both & differ) return false;
    }
    return true;
  }

  /// Symplectic commutation: even number of pairwise-anticommuting sites.
  bool fully_commutes(const PauliString& o) const {
    check_dims(o);
    std::size_t parity = 0;
    for (std::size_t w = 0; w < x_.size(); ++w)
      parity ^= popcount(x_[w] & o.z_[w]) ^ popcount(z_[w] & o.x_[w]);
    return (parity & 1u) == 0;
  }

  bool anticommutes(const PauliString& o) const { return !fully_commutes(o); }

  /// Exact operator product. Returns the phase as i^k (k in 0..3) together
  /// with the mask-XOR result string.
  ///
  /// Bookkeeping uses P(x,z) = i^(x z) X^x Z^z per qubit, so
  /// P1 P2 = i^(x1 z1 + x2 z2 + 2 z1 x2 - x3 z3) P(x1^x2, z1^z2).
  std::pair<std::complex<double>, PauliString> product(
      const PauliString& o) const {
    check_dims(o);
    PauliString r(n_);
    std::size_t k = 0;
    for (std::size_t w = 0; w < x_.size(); ++w) {
      r.x_[w] = x_[w] ^ o.x_[w];
      r.z_[w] = z_[w] ^ o.z_[w];
      k += popcount(x_[w] & z_[w]) + popcount(o.x_[w] & o.z_[w]) +
           2 * popcount(z_[w] & o.x_[w]) + 3 * popcount(r.x_[w] & r.z_[w]);
    }
    static const std::complex<double> phases[4] = {
        {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return {phases[k % 4], r};
  }

  bool operator==(const PauliString& o) const {
    return n_ == o.n_ && x_ == o.x_ && z_ == o.z_;
  }
  bool operator!=(const PauliString& o) const { return !(*this == o); }

  /// Lexicographic order over the text form with I < X < Y < Z; the
  /// canonical tie-break everywhere.
  bool canonical_less(const PauliString& o) const {
    check_dims(o);
    for (std::size_t q = 0; q < n_; ++q) {
      const char a = letter(q), b = o.letter(q);
      if (a != b) return a < b;
    }
    return false;
  }

  std::size_t hash() const {
    std::size_t h = n_;
    for (std::uint64_t w : x_) h = mix(h, w);
    for (std::uint64_t w : z_) h = mix(h, w);
    return h;
  }

 private:
  static std::size_t words(std::size_t n) { return (n + 63) / 64; }
  static void set_bit(std::vector<std::uint64_t>& m, std::size_t q) {
    m[q / 64] |= std::uint64_t(1) << (q % 64);
  }
  static void clear_bit(std::vector<std::uint64_t>& m, std::size_t q) {
    m[q / 64] &= ~(std::uint64_t(1) << (q % 64));
  }
  static bool get_bit(const std::vector<std::uint64_t>& m, std::size_t q) {
    return (m[q / 64] >> (q % 64)) & 1u;
  }
  static std::size_t popcount(std::uint64_t w) {
    return static_cast<std::size_t>(__builtin_popcountll(w));
  }
  static std::size_t mix(std::size_t h, std::uint64_t w) {
    return h ^ (std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull +
                (h << 6) + (h >> 2));
  }
  void check_dims(const PauliString& o) const {
    if (n_ != o.n_)
      throw precondition_error("pauli: qubit counts differ (" +
                               std::to_string(n_) + " vs " +
                               std::to_string(o.n_) + ")");
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

/// A Pauli string with a real coefficient (Hartree for Hamiltonian terms).
struct PauliTerm {
  PauliString pauli;
  double coefficient = 0.0;
};

inline PauliString pauli_from_text(const std::string& s) {
  return PauliString::from_text(s);
}

inline std::pair<std::complex<double>, PauliString> pauli_product(
    const PauliString& p, const PauliString& q) {
  return p.product(q);
}

inline bool qubit_wise_commutes(const PauliString& p, const PauliString& q) {
  return p.qubit_wise_commutes(q);
}

inline bool fully_commutes(const PauliString& p, const PauliString& q) {
  return p.fully_commutes(q);
}

inline bool anticommutes(const PauliString& p, const PauliString& q) {
  return p.anticommutes(q);
}

}  // namespace shotcount
