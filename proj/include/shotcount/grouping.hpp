#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

enum class GroupingMethod { none, qwc, anticommuting, basis_rotation };

inline std::string to_string(GroupingMethod m) {
  switch (m) {
    case GroupingMethod::none: return "none";
    case GroupingMethod::qwc: return "qwc";
    case GroupingMethod::anticommuting: return "anticommuting";
    case GroupingMethod::basis_rotation: return "basis_rotation";
  }
  return "?";
}

/// One simultaneously measurable set.
///
/// Index-based plans (none/qwc/anticommuting) reference Hamiltonian terms by
/// position. Basis-rotation groups instead carry their own members
/// (local_terms) expressed in the rotated measurement frame, plus the
/// spatial-orbital rotation that defines that frame.
struct Group {
  std::vector<std::size_t> term_indices;
  std::string measurement_basis;                // QWC/none only
  std::optional<Eigen::MatrixXd> rotation;      // basis_rotation only
  std::vector<PauliTerm> local_terms;           // basis_rotation only
};

struct GroupingPlan {
  GroupingMethod method = GroupingMethod::none;
  std::vector<Group> groups;
  std::size_t n_qubits = 0;
};

namespace detail {

/// Iteration order: descending |h| with canonical tie-break, or input order.
inline std::vector<std::size_t> term_order(const QubitHamiltonian& h,
                                           bool sort_by_coefficient) {
  std::vector<std::size_t> order(h.terms.size());
  std::iota(order.begin(), order.end(), 0);
  if (sort_by_coefficient) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       const double ca = std::abs(h.terms[a].coefficient);
                       const double cb = std::abs(h.terms[b].coefficient);
                       if (ca != cb) return ca > cb;
                       return h.terms[a].pauli.canonical_less(
                           h.terms[b].pauli);
                     });
  }
  return order;
}

template <typename Compatible>
GroupingPlan greedy_first_fit(const QubitHamiltonian& h,
                              bool sort_by_coefficient, GroupingMethod method,
                              Compatible&& compatible) {
  if (h.terms.empty())
    throw precondition_error("grouping: Hamiltonian has no terms");
  GroupingPlan plan;
  plan.method = method;
  plan.n_qubits = h.n_qubits;
  for (std::size_t idx : term_order(h, sort_by_coefficient)) {
    const PauliString& p = h.terms[idx].pauli;
    bool placed = false;
    for (auto& g : plan.groups) {
      bool ok = true;
      for (std::size_t member : g.term_indices)
        if (!compatible(p, h.terms[member].pauli)) {
          ok = false;
          break;
        }
      if (ok) {
        g.term_indices.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) plan.groups.push_back({{idx}, "", std::nullopt, {}});
  }
  return plan;
}

inline std::string basis_union(const QubitHamiltonian& h,
                               const std::vector<std::size_t>& members) {
  std::string basis(h.n_qubits, 'I');
  for (std::size_t idx : members)
    for (std::size_t q = 0; q < h.n_qubits; ++q) {
      const char c = h.terms[idx].pauli.letter(q);
      if (c != 'I') basis[q] = c;
    }
  return basis;
}

}  // namespace detail

/// Greedy sorted-insertion qubit-wise-commuting grouping: each term joins
/// the first existing group it QWC-commutes with entirely, else opens a new
/// group. Group scan order is creation order.
inline GroupingPlan group_qwc(const QubitHamiltonian& h,
                              bool sort_by_coefficient = true) {
  auto plan = detail::greedy_first_fit(
      h, sort_by_coefficient, GroupingMethod::qwc,
      [](const PauliString& a, const PauliString& b) {
        return a.qubit_wise_commutes(b);
      });
  for (auto& g : plan.groups)
    g.measurement_basis = detail::basis_union(h, g.term_indices);
  return plan;
}

/// Same greedy algorithm with the anticommutation predicate. Used for K
/// accounting only; no per-qubit measurement basis exists.
inline GroupingPlan group_anticommuting(const QubitHamiltonian& h,
                                        bool sort_by_coefficient = true) {
  return detail::greedy_first_fit(
      h, sort_by_coefficient, GroupingMethod::anticommuting,
      [](const PauliString& a, const PauliString& b) {
        return a.anticommutes(b);
      });
}

/// One term per group; the no-grouping baseline.
inline GroupingPlan group_singletons(const QubitHamiltonian& h) {
  if (h.terms.empty())
    throw precondition_error("grouping: Hamiltonian has no terms");
  GroupingPlan plan;
  plan.method = GroupingMethod::none;
  plan.n_qubits = h.n_qubits;
  plan.groups.reserve(h.terms.size());
  for (std::size_t i = 0; i < h.terms.size(); ++i)
    plan.groups.push_back(
        {{i}, detail::basis_union(h, {i}), std::nullopt, {}});
  return plan;
}

/// Checks the partition property for index-based plans.
inline void validate_partition(const QubitHamiltonian& h,
                               const GroupingPlan& plan) {
  if (plan.method == GroupingMethod::basis_rotation) return;
  std::vector<int> seen(h.terms.size(), 0);
  for (const auto& g : plan.groups)
    for (std::size_t idx : g.term_indices) {
      if (idx >= h.terms.size())
        throw precondition_error("plan: term index out of range");
      ++seen[idx];
    }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i] != 1)
      throw precondition_error("plan: term " + std::to_string(i) +
                               " appears " + std::to_string(seen[i]) +
                               " times; not a partition");
}

}  // namespace shotcount
