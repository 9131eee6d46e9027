#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "shotcount/errors.hpp"
#include "shotcount/factorize.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/oracle.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

/// Per-operator variance model. upper_bound uses Var(P) = 1; from_state
/// evaluates Var(P) = 1 - <P>^2 on the attached state.
struct VarianceModel {
  enum class Kind { upper_bound, from_state };
  Kind kind = Kind::upper_bound;
  const Statevector* state = nullptr;

  static VarianceModel upper_bound() { return {Kind::upper_bound, nullptr}; }
  static VarianceModel from_state(const Statevector& s) {
    return {Kind::from_state, &s};
  }
};

/// Cross-operator covariance model within a group. zero drops all
/// off-diagonal contributions; from_state uses
/// Covar(P,Q) = Re<PQ> - <P><Q> on the attached state.
struct CovarianceModel {
  enum class Kind { zero, from_state };
  Kind kind = Kind::zero;
  const Statevector* state = nullptr;

  static CovarianceModel zero() { return {Kind::zero, nullptr}; }
  static CovarianceModel from_state(const Statevector& s) {
    return {Kind::from_state, &s};
  }
};

struct KEstimate {
  double k = 0.0;                        // Hartree^2
  std::vector<double> group_masses;      // g_C, clamped at zero
  std::vector<double> shot_fractions;    // sqrt(g_C) / sum sqrt(g_D)
};

namespace detail {

// Group masses can dip slightly negative through floating-point
// cancellation in the from_state covariances; anything below this is a
// logic error rather than roundoff.
constexpr double kMassTolerance = 1e-10;

inline double pair_covariance(const PauliString& a, const PauliString& b,
                              double ea, double eb, const Statevector& s) {
  auto [phase, prod] = a.product(b);
  double eab;
  if (prod.is_identity()) {
    eab = phase.real();
  } else {
    // <PQ> is complex in general; only the real part enters the
    // symmetrized covariance.
    const std::complex<double> v =
        s.amplitudes.dot(apply_pauli(prod, s.amplitudes)) * phase;
    eab = v.real();
  }
  return eab - ea * eb;
}

/// Members of an index-based group as (pauli, coefficient) views.
struct MemberView {
  const PauliString* pauli;
  double coefficient;
};

inline std::vector<MemberView> group_members(const QubitHamiltonian& h,
                                             const Group& g,
                                             bool index_based) {
  std::vector<MemberView> m;
  if (index_based) {
    m.reserve(g.term_indices.size());
    for (std::size_t idx : g.term_indices)
      m.push_back({&h.terms[idx].pauli, h.terms[idx].coefficient});
  } else {
    m.reserve(g.local_terms.size());
    for (const auto& t : g.local_terms)
      m.push_back({&t.pauli, t.coefficient});
  }
  return m;
}

/// Expectation of a product of rotated-frame Z~ factors: applies
/// (I - 2 n~_i) sequentially using the JW images of the rotated number
/// operators. Valid because the Z~_i mutually commute and square to I.
inline double rotated_z_expectation(
    const PauliString& local, const std::vector<QubitHamiltonian>& zimages,
    const Statevector& s) {
  Eigen::VectorXcd v = s.amplitudes;
  for (std::size_t q = 0; q < local.n_qubits(); ++q)
    if (local.letter(q) == 'Z') v = apply_hamiltonian(zimages[q], v);
  const std::complex<double> e = s.amplitudes.dot(v);
  if (std::abs(e.imag()) > 1e-8)
    throw consistency_error("rotated expectation: non-real value");
  return e.real();
}

}  // namespace detail

/// Measurement constant K = (sum_C sqrt(g_C))^2 with
/// g_C = sum_{a,b in C} h_a h_b Covar(P_a, P_b), the variance of the
/// optimally shot-allocated estimator at unit total budget.
inline KEstimate compute_k(const QubitHamiltonian& h, const GroupingPlan& plan,
                           const VarianceModel& vm, const CovarianceModel& cm) {
  if (plan.n_qubits != h.n_qubits)
    throw precondition_error("compute_k: qubit count mismatch");
  validate_partition(h, plan);
  const bool rotated_plan = plan.method == GroupingMethod::basis_rotation;
  const Statevector* vstate = vm.state;
  const Statevector* cstate = cm.state ? cm.state : vm.state;
  if (vm.kind == VarianceModel::Kind::from_state && !vstate)
    throw precondition_error("compute_k: variance model needs a state");
  if (cm.kind == CovarianceModel::Kind::from_state && !cstate)
    throw precondition_error("compute_k: covariance model needs a state");
  if (vstate && vstate->n_qubits != h.n_qubits)
    throw precondition_error("compute_k: state dimension mismatch");

  KEstimate ke;
  ke.group_masses.reserve(plan.groups.size());

  // Per-group cache of rotated Z~ images (basis-rotation from_state only).
  for (const auto& g : plan.groups) {
    const bool rotated = rotated_plan && g.rotation.has_value();
    const auto members = detail::group_members(h, g, !rotated_plan);
    std::vector<QubitHamiltonian> zimages;
    if (rotated && (vm.kind == VarianceModel::Kind::from_state ||
                    cm.kind == CovarianceModel::Kind::from_state)) {
      zimages.resize(h.n_qubits);
      std::vector<bool> needed(h.n_qubits, false);
      for (const auto& m : members)
        for (std::size_t q = 0; q < h.n_qubits; ++q)
          if (m.pauli->letter(q) == 'Z') needed[q] = true;
      for (std::size_t q = 0; q < h.n_qubits; ++q) {
        if (!needed[q]) continue;
        PauliAccumulator a(h.n_qubits);
        a.add(PauliString(h.n_qubits), 1.0);
        a.add(rotated_number_operator(*g.rotation, q, h.n_qubits), -2.0);
        zimages[q] = a.finalize();
      }
    }

    auto member_expectation = [&](const PauliString& p,
                                  const Statevector& s) -> double {
      if (!rotated) return expectation(p, s);
      return detail::rotated_z_expectation(p, zimages, s);
    };

    std::vector<double> means(members.size(), 0.0);
    const bool need_means =
        vm.kind == VarianceModel::Kind::from_state ||
        cm.kind == CovarianceModel::Kind::from_state;
    if (need_means) {
      const Statevector& s = vstate ? *vstate : *cstate;
      for (std::size_t i = 0; i < members.size(); ++i)
        means[i] = member_expectation(*members[i].pauli, s);
    }

    std::vector<double> vars(members.size(), 1.0);
    if (vm.kind == VarianceModel::Kind::from_state)
      for (std::size_t i = 0; i < members.size(); ++i)
        vars[i] = 1.0 - means[i] * means[i];

    double mass = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
      mass += members[i].coefficient * members[i].coefficient * vars[i];

    if (cm.kind == CovarianceModel::Kind::from_state) {
      const Statevector& s = *cstate;
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
          double cov;
          if (rotated) {
            // Z~ strings compose by support XOR with unit phase.
            auto [phase, prod] = members[i].pauli->product(*members[j].pauli);
            const double eij =
                prod.is_identity()
                    ? phase.real()
                    : detail::rotated_z_expectation(prod, zimages, s) *
                          phase.real();
            cov = eij - means[i] * means[j];
          } else {
            cov = detail::pair_covariance(*members[i].pauli,
                                          *members[j].pauli, means[i],
                                          means[j], s);
          }
          const double bound =
              std::sqrt(std::max(vars[i], 0.0) * std::max(vars[j], 0.0));
          if (std::abs(cov) > bound + 1e-8)
            throw consistency_error(
                "compute_k: covariance violates the Cauchy-Schwarz bound");
          mass += 2.0 * members[i].coefficient * members[j].coefficient * cov;
        }
    }

    if (mass < -detail::kMassTolerance)
      throw consistency_error("compute_k: negative group mass " +
                              std::to_string(mass));
    ke.group_masses.push_back(std::max(mass, 0.0));
  }

  double root_sum = 0.0;
  for (double m : ke.group_masses) root_sum += std::sqrt(m);
  ke.k = root_sum * root_sum;
  ke.shot_fractions.resize(ke.group_masses.size(), 0.0);
  if (root_sum > 0.0)
    for (std::size_t i = 0; i < ke.group_masses.size(); ++i)
      ke.shot_fractions[i] = std::sqrt(ke.group_masses[i]) / root_sum;
  return ke;
}

/// Total shots M = K / (rdmc_factor * epsilon^2) for a target standard
/// deviation epsilon (Hartree).
inline double measurement_count(double k, double epsilon,
                                double rdmc_factor = 1.0) {
  if (epsilon <= 0.0)
    throw precondition_error("measurement_count: epsilon must be positive");
  if (rdmc_factor <= 0.0)
    throw precondition_error(
        "measurement_count: rdmc_factor must be positive");
  if (k < 0.0)
    throw precondition_error("measurement_count: negative K");
  return k / (rdmc_factor * epsilon * epsilon);
}

/// Integer shot allocation: every positive-mass group gets at least one
/// shot, the remainder follows the optimal sqrt-mass fractions via largest
/// remainder (ties broken by group index).
inline std::vector<std::uint64_t> allocate_shots(const KEstimate& ke,
                                                 std::uint64_t total_shots) {
  const std::size_t n = ke.group_masses.size();
  std::vector<std::uint64_t> out(n, 0);
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < n; ++i)
    if (ke.group_masses[i] > 0.0) positive.push_back(i);
  if (positive.empty()) return out;
  if (total_shots < positive.size())
    throw precondition_error(
        "allocate_shots: budget " + std::to_string(total_shots) +
        " below the one-shot floor for " + std::to_string(positive.size()) +
        " groups");

  double root_sum = 0.0;
  for (std::size_t i : positive) root_sum += std::sqrt(ke.group_masses[i]);
  const std::uint64_t rest = total_shots - positive.size();
  std::vector<double> remainder(positive.size());
  std::uint64_t assigned = 0;
  for (std::size_t j = 0; j < positive.size(); ++j) {
    const double quota =
        double(rest) * std::sqrt(ke.group_masses[positive[j]]) / root_sum;
    const auto floor_q = static_cast<std::uint64_t>(std::floor(quota));
    out[positive[j]] = 1 + floor_q;
    remainder[j] = quota - double(floor_q);
    assigned += floor_q;
  }
  std::vector<std::size_t> order(positive.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return positive[a] < positive[b];
  });
  for (std::size_t j = 0; assigned < rest; ++j) {
    out[positive[order[j]]] += 1;
    ++assigned;
  }
  return out;
}

}  // namespace shotcount
