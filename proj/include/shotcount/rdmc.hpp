#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"
#include "shotcount/estimator.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/jordan_wigner.hpp"
#include "shotcount/oracle.hpp"
#include "shotcount/pauli.hpp"

namespace shotcount {

/// Symmetry operators with known eigenvalues on the target state. Shifting
/// H -> H - sum_i alpha_i (C_i - c_i) leaves every expectation value on that
/// state unchanged while reshaping the measurement cost.
struct ConstraintSet {
  std::vector<QubitHamiltonian> operators;
  std::vector<double> target_values;
};

/// The qubit-picture constraint pool: particle number N, spin projection
/// Sz, the squared number deviation (N - n_el)^2, and the per-spin-orbital
/// products n_q (N - n_el). All are diagonal (Z-only) under JW.
inline ConstraintSet standard_constraints(std::size_t n_qubits,
                                          std::size_t n_electrons,
                                          int two_m_s) {
  if (n_qubits == 0 || n_qubits % 2 != 0)
    throw precondition_error(
        "standard_constraints: qubit count must be even and positive");
  ConstraintSet cs;

  QubitHamiltonian number;
  number.n_qubits = n_qubits;
  number.identity_offset = 0.5 * double(n_qubits);
  for (std::size_t q = 0; q < n_qubits; ++q) {
    PauliString z(n_qubits);
    z.set_letter(q, 'Z');
    number.terms.push_back({z, -0.5});
  }
  cs.operators.push_back(number);
  cs.target_values.push_back(double(n_electrons));

  // Sz = (N_alpha - N_beta)/2 with alpha on even qubits
  PauliAccumulator sz(n_qubits);
  for (std::size_t p = 0; p < n_qubits / 2; ++p) {
    PauliString za(n_qubits), zb(n_qubits);
    za.set_letter(2 * p, 'Z');
    zb.set_letter(2 * p + 1, 'Z');
    sz.add(zb, 0.25);
    sz.add(za, -0.25);
  }
  cs.operators.push_back(sz.finalize());
  cs.target_values.push_back(0.5 * double(two_m_s));

  QubitHamiltonian dev = number;
  dev.identity_offset -= double(n_electrons);
  PauliAccumulator sq = hamiltonian_product(dev, dev);
  cs.operators.push_back(sq.finalize());
  cs.target_values.push_back(0.0);

  for (std::size_t q = 0; q < n_qubits; ++q) {
    QubitHamiltonian nq;
    nq.n_qubits = n_qubits;
    nq.identity_offset = 0.5;
    PauliString z(n_qubits);
    z.set_letter(q, 'Z');
    nq.terms.push_back({z, -0.5});
    cs.operators.push_back(hamiltonian_product(nq, dev).finalize());
    cs.target_values.push_back(0.0);
  }
  return cs;
}

struct ShiftedHamiltonian {
  QubitHamiltonian base;
  std::vector<double> alphas;
  QubitHamiltonian shifted;
  double k_before = 0.0;
  double k_after = 0.0;
  bool budget_exhausted = false;
  std::size_t evaluations = 0;
};

/// shifted = base - sum_i alpha_i (C_i - c_i)
inline QubitHamiltonian apply_shift(const QubitHamiltonian& base,
                                    const ConstraintSet& cs,
                                    const std::vector<double>& alphas) {
  if (alphas.size() != cs.operators.size())
    throw precondition_error("apply_shift: alpha count mismatch");
  PauliAccumulator acc(base.n_qubits);
  acc.add(base);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] == 0.0) continue;
    if (cs.operators[i].n_qubits != base.n_qubits)
      throw precondition_error("apply_shift: constraint qubit mismatch");
    acc.add(cs.operators[i], -alphas[i]);
    acc.add(PauliString(base.n_qubits), alphas[i] * cs.target_values[i]);
  }
  return acc.finalize();
}

namespace detail {

/// Least-absolute-deviations solve  min_alpha sum_j |b_j - (A alpha)_j|
/// via the standard epigraph LP, dense tableau simplex with Bland's rule.
/// Small and exact-optimal; sized for constraint pools, not generic LPs.
inline std::vector<double> lad_solve(const Eigen::MatrixXd& a,
                                     Eigen::VectorXd b) {
  const auto jrows = static_cast<std::size_t>(a.rows());
  const auto k = static_cast<std::size_t>(a.cols());
  if (jrows == 0) return std::vector<double>(k, 0.0);

  Eigen::MatrixXd an = a;
  for (std::size_t j = 0; j < jrows; ++j)
    if (b(static_cast<Eigen::Index>(j)) < 0) {
      b(static_cast<Eigen::Index>(j)) = -b(static_cast<Eigen::Index>(j));
      an.row(static_cast<Eigen::Index>(j)) =
          -an.row(static_cast<Eigen::Index>(j));
    }

  // columns: t (J) | u (k) | v (k) | s1 (J) | s2 (J)
  const std::size_t m = 2 * jrows;
  const std::size_t nv = 3 * jrows + 2 * k;
  const std::size_t off_u = jrows, off_v = jrows + k;
  const std::size_t off_s1 = jrows + 2 * k, off_s2 = off_s1 + jrows;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                            static_cast<Eigen::Index>(nv));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  std::vector<std::size_t> basic(m);
  for (std::size_t j = 0; j < jrows; ++j) {
    const auto r1 = static_cast<Eigen::Index>(2 * j);
    const auto r2 = static_cast<Eigen::Index>(2 * j + 1);
    // r1:  t_j + A_j (u - v) - s1_j = b_j            (basic: t_j)
    // r2:  2 A_j (u - v) - s1_j + s2_j = 2 b_j       (basic: s2_j)
    t(r1, static_cast<Eigen::Index>(j)) = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double aji = an(static_cast<Eigen::Index>(j),
                            static_cast<Eigen::Index>(i));
      t(r1, static_cast<Eigen::Index>(off_u + i)) = aji;
      t(r1, static_cast<Eigen::Index>(off_v + i)) = -aji;
      t(r2, static_cast<Eigen::Index>(off_u + i)) = 2.0 * aji;
      t(r2, static_cast<Eigen::Index>(off_v + i)) = -2.0 * aji;
    }
    t(r1, static_cast<Eigen::Index>(off_s1 + j)) = -1.0;
    t(r2, static_cast<Eigen::Index>(off_s1 + j)) = -1.0;
    t(r2, static_cast<Eigen::Index>(off_s2 + j)) = 1.0;
    rhs(r1) = b(static_cast<Eigen::Index>(j));
    rhs(r2) = 2.0 * b(static_cast<Eigen::Index>(j));
    basic[2 * j] = j;
    basic[2 * j + 1] = off_s2 + j;
  }

  // reduced costs for min sum t_j: z_c = sum over t-basic rows - c_c
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  for (std::size_t j = 0; j < jrows; ++j)
    cost += t.row(static_cast<Eigen::Index>(2 * j)).transpose();
  for (std::size_t j = 0; j < jrows; ++j)
    cost(static_cast<Eigen::Index>(j)) -= 1.0;

  const double tol = 1e-9;
  const std::size_t max_iter = 200000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Bland's rule: first improving column, first eligible row
    std::size_t enter = nv;
    for (std::size_t c = 0; c < nv; ++c)
      if (cost(static_cast<Eigen::Index>(c)) > tol) {
        enter = c;
        break;
      }
    if (enter == nv) break;  // optimal

    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double piv = t(static_cast<Eigen::Index>(r),
                           static_cast<Eigen::Index>(enter));
      if (piv <= tol) continue;
      const double ratio = rhs(static_cast<Eigen::Index>(r)) / piv;
      if (leave == m || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 &&
           basic[r] < basic[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave == m)
      throw consistency_error("lad_solve: unbounded objective");

    const auto lr = static_cast<Eigen::Index>(leave);
    const auto ec = static_cast<Eigen::Index>(enter);
    const double piv = t(lr, ec);
    t.row(lr) /= piv;
    rhs(lr) /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave) continue;
      const auto rr = static_cast<Eigen::Index>(r);
      const double f = t(rr, ec);
      if (f != 0.0) {
        t.row(rr) -= f * t.row(lr);
        rhs(rr) -= f * rhs(lr);
      }
    }
    const double fc = cost(ec);
    if (fc != 0.0) cost -= fc * t.row(lr).transpose();
    basic[leave] = enter;
    if (iter + 1 == max_iter)
      throw consistency_error("lad_solve: iteration limit reached");
  }

  std::vector<double> alpha(k, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basic[r] >= off_u && basic[r] < off_v)
      alpha[basic[r] - off_u] += rhs(static_cast<Eigen::Index>(r));
    else if (basic[r] >= off_v && basic[r] < off_s1)
      alpha[basic[r] - off_v] -= rhs(static_cast<Eigen::Index>(r));
  }
  return alpha;
}

/// Shared coefficient bookkeeping for the shift optimizer: a fixed union of
/// Pauli strings with coefficients linear in alpha.
struct ShiftSupport {
  std::vector<PauliString> strings;
  Eigen::VectorXd base_coeffs;   // b
  Eigen::MatrixXd shift_mat;     // A: coeff_j(alpha) = b_j - (A alpha)_j
  std::size_t n_qubits = 0;

  static ShiftSupport build(const QubitHamiltonian& h,
                            const ConstraintSet& cs) {
    ShiftSupport sup;
    sup.n_qubits = h.n_qubits;
    std::unordered_map<PauliString, std::size_t, PauliStringHash> index;
    auto intern = [&](const PauliString& p) {
      auto it = index.find(p);
      if (it != index.end()) return it->second;
      const std::size_t id = sup.strings.size();
      index.emplace(p, id);
      sup.strings.push_back(p);
      return id;
    };
    for (const auto& t : h.terms) intern(t.pauli);
    for (const auto& c : cs.operators)
      for (const auto& t : c.terms) intern(t.pauli);

    const auto s = static_cast<Eigen::Index>(sup.strings.size());
    const auto k = static_cast<Eigen::Index>(cs.operators.size());
    sup.base_coeffs = Eigen::VectorXd::Zero(s);
    sup.shift_mat = Eigen::MatrixXd::Zero(s, k);
    for (const auto& t : h.terms)
      sup.base_coeffs(static_cast<Eigen::Index>(intern(t.pauli))) =
          t.coefficient;
    for (std::size_t i = 0; i < cs.operators.size(); ++i)
      for (const auto& t : cs.operators[i].terms)
        sup.shift_mat(static_cast<Eigen::Index>(intern(t.pauli)),
                      static_cast<Eigen::Index>(i)) = t.coefficient;
    return sup;
  }

  Eigen::VectorXd coeffs(const Eigen::VectorXd& alpha) const {
    return base_coeffs - shift_mat * alpha;
  }
};

/// Partition of the union strings plus precomputed per-group covariance
/// matrices; K(alpha) evaluation reduces to quadratic forms.
struct ShiftObjective {
  std::vector<std::vector<std::size_t>> groups;   // string indices
  std::vector<Eigen::MatrixXd> covs;

  double k(const Eigen::VectorXd& c) const {
    double root_sum = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      Eigen::VectorXd cg(static_cast<Eigen::Index>(groups[gi].size()));
      for (std::size_t m = 0; m < groups[gi].size(); ++m)
        cg(static_cast<Eigen::Index>(m)) =
            c(static_cast<Eigen::Index>(groups[gi][m]));
      const double mass = cg.dot(covs[gi] * cg);
      root_sum += std::sqrt(std::max(mass, 0.0));
    }
    return root_sum * root_sum;
  }
};

}  // namespace detail

/// Grouping plan for the given method on an index-based Hamiltonian.
/// basis_rotation is rejected: its plan derives from molecular integrals,
/// which a shifted Pauli sum no longer carries.
inline GroupingPlan plan_for_method(const QubitHamiltonian& h,
                                    GroupingMethod method) {
  switch (method) {
    case GroupingMethod::none: return group_singletons(h);
    case GroupingMethod::qwc: return group_qwc(h);
    case GroupingMethod::anticommuting: return group_anticommuting(h);
    case GroupingMethod::basis_rotation:
      throw precondition_error(
          "plan_for_method: basis_rotation requires molecular integrals");
  }
  throw precondition_error("plan_for_method: unknown method");
}

/// Optimizes the constraint shift for minimal K. For the (none,
/// upper_bound, zero) model the objective is (sum_j |coeff_j|)^2 and the
/// exact optimum comes from a least-absolute-deviations LP; every other
/// model runs cyclic coordinate descent with golden-section line searches,
/// re-grouping at the start of each sweep. budget caps the number of K
/// evaluations (K never increases: the base point alpha = 0 is kept when
/// nothing better is found).
inline ShiftedHamiltonian optimize_shift(const QubitHamiltonian& h,
                                         const ConstraintSet& cs,
                                         GroupingMethod method,
                                         const VarianceModel& vm,
                                         const CovarianceModel& cm,
                                         std::size_t budget) {
  if (cs.operators.size() != cs.target_values.size())
    throw precondition_error("optimize_shift: malformed constraint set");
  for (const auto& c : cs.operators)
    if (c.n_qubits != h.n_qubits)
      throw precondition_error("optimize_shift: constraint qubit mismatch");

  ShiftedHamiltonian out;
  out.base = h;
  out.alphas.assign(cs.operators.size(), 0.0);
  out.shifted = h;
  out.k_before =
      compute_k(h, plan_for_method(h, method), vm, cm).k;
  out.k_after = out.k_before;

  if (budget == 0) {
    out.budget_exhausted = true;
    return out;
  }

  const auto sup = detail::ShiftSupport::build(h, cs);
  const auto k_params = static_cast<Eigen::Index>(cs.operators.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(k_params);

  const bool lp_path = method == GroupingMethod::none &&
                       vm.kind == VarianceModel::Kind::upper_bound &&
                       cm.kind == CovarianceModel::Kind::zero;
  if (lp_path) {
    const auto sol = detail::lad_solve(sup.shift_mat, sup.base_coeffs);
    for (Eigen::Index i = 0; i < k_params; ++i)
      alpha(i) = sol[static_cast<std::size_t>(i)];
    out.evaluations = 1;
  } else {
    // expectation cache over arbitrary strings (from_state models)
    std::unordered_map<PauliString, double, PauliStringHash> mean_cache;
    const Statevector* vstate = vm.state;
    const Statevector* cstate = cm.state ? cm.state : vm.state;
    auto mean = [&](const PauliString& p,
                    const Statevector& s) -> double {
      if (p.is_identity()) return 1.0;
      auto it = mean_cache.find(p);
      if (it != mean_cache.end()) return it->second;
      const double e = expectation(p, s);
      mean_cache.emplace(p, e);
      return e;
    };

    auto build_objective =
        [&](const Eigen::VectorXd& a) -> detail::ShiftObjective {
      detail::ShiftObjective obj;
      const Eigen::VectorXd c = sup.coeffs(a);
      QubitHamiltonian cur;
      cur.n_qubits = h.n_qubits;
      std::vector<std::size_t> live;  // string index per term
      for (std::size_t j = 0; j < sup.strings.size(); ++j)
        if (std::abs(c(static_cast<Eigen::Index>(j))) > 1e-12) {
          cur.terms.push_back({sup.strings[j],
                               c(static_cast<Eigen::Index>(j))});
          live.push_back(j);
        }
      std::vector<bool> placed(sup.strings.size(), false);
      if (!cur.terms.empty()) {
        const GroupingPlan plan = plan_for_method(cur, method);
        for (const auto& g : plan.groups) {
          std::vector<std::size_t> members;
          for (std::size_t idx : g.term_indices) {
            members.push_back(live[idx]);
            placed[live[idx]] = true;
          }
          obj.groups.push_back(std::move(members));
        }
      }
      for (std::size_t j = 0; j < sup.strings.size(); ++j)
        if (!placed[j]) obj.groups.push_back({j});

      for (const auto& members : obj.groups) {
        const auto msz = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(msz, msz);
        if (vm.kind == VarianceModel::Kind::from_state) {
          for (Eigen::Index i = 0; i < msz; ++i) {
            const double e = mean(
                sup.strings[members[static_cast<std::size_t>(i)]], *vstate);
            cov(i, i) = 1.0 - e * e;
          }
        }
        if (cm.kind == CovarianceModel::Kind::from_state) {
          for (Eigen::Index i = 0; i < msz; ++i)
            for (Eigen::Index j2 = i + 1; j2 < msz; ++j2) {
              const PauliString& pa =
                  sup.strings[members[static_cast<std::size_t>(i)]];
              const PauliString& pb =
                  sup.strings[members[static_cast<std::size_t>(j2)]];
              auto [phase, prod] = pa.product(pb);
              const double eab = prod.is_identity()
                                     ? phase.real()
                                     : mean(prod, *cstate) * phase.real();
              const double cab =
                  eab - mean(pa, *cstate) * mean(pb, *cstate);
              cov(i, j2) = cov(j2, i) = cab;
            }
        }
        obj.covs.push_back(std::move(cov));
      }
      return obj;
    };

    std::size_t evals = 0;
    bool exhausted = false;
    auto eval = [&](const detail::ShiftObjective& obj,
                    const Eigen::VectorXd& a) -> double {
      ++evals;
      if (evals >= budget) exhausted = true;
      return obj.k(sup.coeffs(a));
    };

    const std::size_t max_sweeps = 50;
    double k_cur = 0.0;
    {
      const auto obj0 = build_objective(alpha);
      k_cur = eval(obj0, alpha);
    }
    for (std::size_t sweep = 0; sweep < max_sweeps && !exhausted; ++sweep) {
      const auto obj = build_objective(alpha);
      const double k_sweep_start = obj.k(sup.coeffs(alpha));
      double k_now = k_sweep_start;
      for (Eigen::Index i = 0; i < k_params && !exhausted; ++i) {
        auto phi = [&](double x) {
          Eigen::VectorXd a = alpha;
          a(i) = x;
          return eval(obj, a);
        };
        // bracket a minimum around the current coordinate
        double xm = alpha(i), fm = k_now;
        double step = 0.5;
        double xl = xm - step, xr = xm + step;
        double fl = phi(xl), fr = phi(xr);
        int guard = 0;
        while (fl < fm && !exhausted && guard++ < 60) {
          xr = xm; fr = fm; xm = xl; fm = fl;
          step *= 2.0; xl = xm - step; fl = phi(xl);
        }
        guard = 0;
        while (fr < fm && !exhausted && guard++ < 60) {
          xl = xm; fl = fm; xm = xr; fm = fr;
          step *= 2.0; xr = xm + step; fr = phi(xr);
        }
        // golden-section on [xl, xr]
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double a1 = xr - gr * (xr - xl), b1 = xl + gr * (xr - xl);
        double fa = phi(a1), fb = phi(b1);
        while (xr - xl > 1e-8 && !exhausted) {
          if (fa < fb) {
            xr = b1; b1 = a1; fb = fa;
            a1 = xr - gr * (xr - xl); fa = phi(a1);
          } else {
            xl = a1; a1 = b1; fa = fb;
            b1 = xl + gr * (xr - xl); fb = phi(b1);
          }
        }
        const double xbest = fa < fb ? a1 : b1;
        const double fbest = std::min(fa, fb);
        if (fbest < k_now) {
          alpha(i) = xbest;
          k_now = fbest;
        }
      }
      k_cur = k_now;
      if (k_sweep_start - k_now <
          1e-7 * std::max(std::abs(k_sweep_start), 1.0))
        break;
    }
    out.evaluations = evals;
    out.budget_exhausted = exhausted;
  }

  std::vector<double> alphas(alpha.data(), alpha.data() + alpha.size());
  QubitHamiltonian shifted = apply_shift(h, cs, alphas);
  double k_after = out.k_before;
  if (!shifted.terms.empty())
    k_after = compute_k(shifted, plan_for_method(shifted, method), vm, cm).k;
  else
    k_after = 0.0;
  if (k_after <= out.k_before + 1e-12) {
    out.alphas = alphas;
    out.shifted = std::move(shifted);
    out.k_after = k_after;
  }
  return out;
}

}  // namespace shotcount
