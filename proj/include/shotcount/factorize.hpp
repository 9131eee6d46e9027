#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"
#include "shotcount/fcidump.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/jordan_wigner.hpp"

namespace shotcount {

/// One rank factor: a spatial-orbital rotation U with per-orbital weights f,
/// so that the factor matrix is g = U diag(f) U^T.
struct Factor {
  double lambda = 1.0;
  Eigen::MatrixXd rotation;   // orthogonal, n_spatial x n_spatial
  Eigen::VectorXd weights;    // f_p, Hartree-scaled
};

struct FactorizedPlan {
  Group z_only_group;         // populated by factorized_to_groups
  Factor one_body_factor;     // effective one-body (contraction folded in)
  std::vector<Factor> two_body_factors;
  double truncation_threshold = 0.0;
  double reconstruction_error = 0.0;   // max-norm on the two-body tensor
  double truncated_weight = 0.0;       // sum of dropped |lambda|
};

namespace detail {

/// Fix eigenvector signs: largest-magnitude component positive.
inline void fix_column_signs(Eigen::MatrixXd& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    u.col(c).cwiseAbs().maxCoeff(&imax);
    if (u(imax, c) < 0) u.col(c) = -u.col(c);
  }
}

}  // namespace detail

/// Low-rank factorization of the two-body tensor for basis-rotation
/// grouping. The operator is first reordered into number-conserving form,
///   1/2 sum (pq|rs) a†_p a_q a†_r a_s  -  1/2 sum_q (pq|qs) a†_p a_s,
/// with the contraction correction folded into an effective one-body
/// matrix. The reshaped matrix A_{(pq),(rs)} = (pq|rs) is symmetrized and
/// eigendecomposed; factors with |lambda| below the threshold are dropped
/// and each kept eigenvector is rediagonalized into rotation + weights.
inline FactorizedPlan factorize_basis_rotation(const MolecularIntegrals& mi,
                                               double threshold) {
  if (threshold < 0)
    throw precondition_error("factorize: negative threshold");
  mi.validate();
  const std::size_t n = mi.n_spatial_orbitals;

  FactorizedPlan fp;
  fp.truncation_threshold = threshold;

  // effective one-body matrix
  Eigen::MatrixXd h_eff = mi.one_body;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t s = 0; s < n; ++s) {
      double corr = 0.0;
      for (std::size_t q = 0; q < n; ++q) corr += mi.eri(p, q, q, s);
      h_eff(p, s) -= 0.5 * corr;
    }
  h_eff = 0.5 * (h_eff + h_eff.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(h_eff);
  if (es1.info() != Eigen::Success)
    throw consistency_error("factorize: one-body eigensolver failed");
  fp.one_body_factor.rotation = es1.eigenvectors();
  fp.one_body_factor.weights = es1.eigenvalues();
  detail::fix_column_signs(fp.one_body_factor.rotation);

  // reshaped two-body matrix A_{(pq),(rs)}
  const Eigen::Index nn = static_cast<Eigen::Index>(n * n);
  Eigen::MatrixXd a(nn, nn);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
          a(p * n + q, r * n + s) = mi.eri(p, q, r, s);
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(a);
  if (es2.info() != Eigen::Success)
    throw consistency_error("factorize: two-body eigensolver failed");

  std::vector<Eigen::Index> order(nn);
  for (Eigen::Index i = 0; i < nn; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(es2.eigenvalues()(x)) > std::abs(es2.eigenvalues()(y));
  });

  const double keep_floor = std::max(threshold, 1e-14);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index idx : order) {
    const double lambda = es2.eigenvalues()(idx);
    if (std::abs(lambda) < keep_floor) {
      fp.truncated_weight += std::abs(lambda);
      continue;
    }
    Eigen::MatrixXd g(n, n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        g(p, q) = es2.eigenvectors()(static_cast<Eigen::Index>(p * n + q),
                                     idx);
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esg(g);
    if (esg.info() != Eigen::Success)
      throw consistency_error("factorize: factor eigensolver failed");
    Factor f;
    f.lambda = lambda;
    f.rotation = esg.eigenvectors();
    f.weights = esg.eigenvalues();
    detail::fix_column_signs(f.rotation);
    fp.two_body_factors.push_back(std::move(f));

    Eigen::VectorXd gvec(nn);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        gvec(static_cast<Eigen::Index>(p * n + q)) = g(p, q);
    rebuilt += lambda * gvec * gvec.transpose();
  }

  double err = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
          err = std::max(err, std::abs(mi.eri(p, q, r, s) -
                                       rebuilt(p * n + q, r * n + s)));
  fp.reconstruction_error = err;
  return fp;
}

/// JW image of the rotated-frame number operator n~_i for spin-orbital i
/// (qubit index under the interleaved map), given the spatial rotation U.
inline QubitHamiltonian rotated_number_operator(const Eigen::MatrixXd& u,
                                                std::size_t spin_orbital,
                                                std::size_t n_qubits) {
  const std::size_t p = spin_orbital / 2;
  const int spin = static_cast<int>(spin_orbital % 2);
  PauliAccumulator acc(n_qubits);
  const auto n = static_cast<std::size_t>(u.rows());
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t r = 0; r < n; ++r) {
      const double w = u(q, p) * u(r, p);
      if (w == 0.0) continue;
      detail::accumulate_ladder_product(
          acc, w,
          {{spin_orbital_qubit(q, spin), true},
           {spin_orbital_qubit(r, spin), false}},
          n_qubits);
    }
  return acc.finalize();
}

namespace detail {

/// Expands 1/2 sum_ij F_i F_j n~_i n~_j (plus an optional pure one-body
/// weight vector) over rotated-frame Z strings. Returns members without the
/// identity part; the identity is physically an offset and is dropped.
inline std::vector<PauliTerm> number_square_members(
    const Eigen::VectorXd& spatial_weights, double half_lambda,
    std::size_t n_qubits, bool square) {
  const auto n = static_cast<std::size_t>(spatial_weights.size());
  // linear form  B = sum_i (F_i/2)(I - Z~_i)  over spin-orbitals
  std::vector<std::pair<PauliString, double>> linear;
  double lin_const = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (int spin = 0; spin < 2; ++spin) {
      const double f = spatial_weights(static_cast<Eigen::Index>(p));
      if (f == 0.0) continue;
      PauliString z(n_qubits);
      z.set_letter(spin_orbital_qubit(p, spin), 'Z');
      linear.push_back({z, -0.5 * f});
      lin_const += 0.5 * f;
    }

  std::unordered_map<PauliString, double, PauliStringHash> out;
  if (!square) {
    for (const auto& [z, c] : linear) out[z] += half_lambda * 2.0 * c;
  } else {
    // (lin_const + sum c_i Z_i)^2 with Z_i^2 = I and XOR composition
    for (const auto& [za, ca] : linear) {
      out[za] += half_lambda * 2.0 * lin_const * ca;
      for (const auto& [zb, cb] : linear) {
        auto [phase, zr] = za.product(zb);
        if (zr.is_identity()) continue;
        out[zr] += half_lambda * ca * cb * phase.real();
      }
    }
  }
  std::vector<PauliTerm> members;
  for (const auto& [z, c] : out)
    if (std::abs(c) > 1e-12) members.push_back({z, c});
  std::sort(members.begin(), members.end(),
            [](const PauliTerm& a, const PauliTerm& b) {
              return a.pauli.canonical_less(b.pauli);
            });
  return members;
}

}  // namespace detail

/// Assembles the basis-rotation grouping plan: one group per kept two-body
/// factor (members in the rotated frame), one group for the rotated
/// one-body factor, plus a native computational-basis group holding the
/// Z-only residual between the Hamiltonian and the factor expansion.
/// Expanding every group back to the original frame and summing reproduces
/// h up to identity; a residual with X/Y content beyond what the truncation
/// can explain means the plan and Hamiltonian come from different integrals.
inline GroupingPlan factorized_to_groups(FactorizedPlan& fp,
                                         const QubitHamiltonian& h) {
  const auto n =
      static_cast<std::size_t>(fp.one_body_factor.rotation.rows());
  const std::size_t nq = 2 * n;
  if (h.n_qubits != nq)
    throw precondition_error(
        "factorized_to_groups: qubit count mismatch with Hamiltonian");

  GroupingPlan plan;
  plan.method = GroupingMethod::basis_rotation;
  plan.n_qubits = nq;

  PauliAccumulator expansion(nq);

  // rotated one-body group
  {
    Group g;
    g.rotation = fp.one_body_factor.rotation;
    g.local_terms = detail::number_square_members(
        fp.one_body_factor.weights, 0.5, nq, /*square=*/false);
    const Eigen::MatrixXd h_eff =
        fp.one_body_factor.rotation *
        fp.one_body_factor.weights.asDiagonal() *
        fp.one_body_factor.rotation.transpose();
    expansion.add(jw_one_body(h_eff, nq).finalize());
    plan.groups.push_back(std::move(g));
  }

  // rotated two-body factor groups
  for (const Factor& f : fp.two_body_factors) {
    Group g;
    g.rotation = f.rotation;
    g.local_terms =
        detail::number_square_members(f.weights, 0.5 * f.lambda, nq,
                                      /*square=*/true);
    const Eigen::MatrixXd gm =
        f.rotation * f.weights.asDiagonal() * f.rotation.transpose();
    const QubitHamiltonian gop = jw_one_body(gm, nq).finalize();
    PauliAccumulator sq = hamiltonian_product(gop, gop);
    for (const auto& [p, c] : sq.raw()) expansion.add(p, 0.5 * f.lambda * c);
    plan.groups.push_back(std::move(g));
  }

  // residual: h minus the factor expansion, identity ignored
  PauliAccumulator residual(nq);
  for (const auto& t : h.terms) residual.add(t.pauli, t.coefficient);
  for (const auto& [p, c] : expansion.raw()) residual.add(p, -c);
  const QubitHamiltonian res = residual.finalize(1e-12, 1e-8);

  const double xy_tol =
      1e-8 + 2.0 * fp.truncated_weight * double(n * n);
  Group z_only;
  for (const auto& t : res.terms) {
    if (t.pauli.is_z_only()) {
      z_only.local_terms.push_back(t);
    } else if (std::abs(t.coefficient) > xy_tol) {
      throw consistency_error(
          "factorized_to_groups: frame mismatch, X/Y residual " +
          std::to_string(t.coefficient) + " on " + t.pauli.to_string());
    }
  }
  std::sort(z_only.local_terms.begin(), z_only.local_terms.end(),
            [](const PauliTerm& a, const PauliTerm& b) {
              return a.pauli.canonical_less(b.pauli);
            });
  fp.z_only_group = z_only;
  plan.groups.insert(plan.groups.begin(), std::move(z_only));
  return plan;
}

/// Original-frame Pauli expansion of one basis-rotation group; the symbolic
/// side of the round-trip contract (and of expectation evaluation when a
/// dense route is wanted).
inline QubitHamiltonian expand_group_to_original_frame(const Group& g,
                                                       std::size_t n_qubits) {
  PauliAccumulator acc(n_qubits);
  if (!g.rotation) {
    for (const auto& t : g.local_terms) acc.add(t.pauli, t.coefficient);
    return acc.finalize();
  }
  // cache rotated single-qubit Z images: Z~_i = I - 2 n~_i
  std::vector<QubitHamiltonian> zimg(n_qubits);
  std::vector<bool> have(n_qubits, false);
  auto zop = [&](std::size_t i) -> const QubitHamiltonian& {
    if (!have[i]) {
      PauliAccumulator a(n_qubits);
      a.add(PauliString(n_qubits), 1.0);
      a.add(rotated_number_operator(*g.rotation, i, n_qubits), -2.0);
      zimg[i] = a.finalize();
      have[i] = true;
    }
    return zimg[i];
  };
  for (const auto& t : g.local_terms) {
    std::vector<std::size_t> sup;
    for (std::size_t q = 0; q < n_qubits; ++q)
      if (t.pauli.letter(q) == 'Z') sup.push_back(q);
    PauliAccumulator prod(n_qubits);
    prod.add(PauliString(n_qubits), 1.0);
    for (std::size_t i : sup) {
      PauliAccumulator zi(n_qubits);
      zi.add(zop(i));
      prod = PauliAccumulator::product(prod, zi);
    }
    for (const auto& [p, c] : prod.raw()) acc.add(p, t.coefficient * c);
  }
  return acc.finalize();
}

}  // namespace shotcount
