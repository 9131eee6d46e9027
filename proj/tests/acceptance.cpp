// End-to-end acceptance checks. One line per criterion: PASS/FAIL plus a
// short measurement summary. Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "shotcount/estimator.hpp"
#include "shotcount/factorize.hpp"
#include "shotcount/fcidump.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/jordan_wigner.hpp"
#include "shotcount/oracle.hpp"
#include "shotcount/rdmc.hpp"
#include "shotcount/scaling.hpp"
#include "shotcount/json_io.hpp"

using namespace shotcount;

namespace {

int failures = 0;

void criterion(int n, const std::string& name,
               const std::function<std::string()>& body) {
  try {
    const std::string detail = body();
    std::printf("PASS  criterion %d (%s)%s%s\n", n, name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
  } catch (const std::exception& e) {
    ++failures;
    std::printf("FAIL  criterion %d (%s): %s\n", n, name.c_str(), e.what());
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

QubitHamiltonian h2_hamiltonian() {
  return jordan_wigner(
      load_fcidump(testhelp::data_path("h2_sto3g.fcidump")));
}

struct Table2Row {
  const char* molecule;
  std::size_t n_el;
  std::size_t n_q;
  double k_kilo;    // K * 1e-3
  double m_giga;    // M * 1e-9
  double t_days;
};

// published runtime table (epsilon = 0.5 mHa, variance-reduction factor 2)
const Table2Row kExpected[] = {
    {"H2O", 8, 104, 1.9, 3.9, 2.3},    {"CO2", 16, 208, 16, 32, 39},
    {"methane", 8, 104, 1.6, 3.2, 1.9}, {"methanol", 14, 182, 8.4, 17, 18},
    {"ethane", 14, 182, 8.5, 17, 18},   {"ethene", 12, 156, 6.6, 13, 12},
    {"ethyne", 10, 130, 3.1, 6.2, 4.6}, {"ethanol", 20, 260, 24, 48, 71},
    {"propane", 20, 260, 16, 31, 47},   {"propene", 18, 234, 23, 46, 62},
    {"propyne", 16, 208, 18, 36, 44},
};

}  // namespace

int main() {
  criterion(1, "runtime table reproduction", [] {
    const auto rows =
        load_molecule_rows(testhelp::data_path("table1_coefficients.csv"));
    require(rows.size() == 11, "expected 11 molecules");
    const auto report = table2_pipeline(rows, 5e-4, 2.0);
    for (const auto& exp : kExpected) {
      const auto it = std::find_if(
          report.begin(), report.end(),
          [&](const RuntimeEstimate& e) { return e.molecule == exp.molecule; });
      require(it != report.end(), std::string("missing ") + exp.molecule);
      require(it->n_qubits == exp.n_q,
              std::string(exp.molecule) + ": qubit count mismatch");
      require(std::abs(it->k / 1e3 - exp.k_kilo) <= 0.05 * exp.k_kilo,
              std::string(exp.molecule) + ": K off by more than 5%");
      require(std::abs(it->measurements / 1e9 - exp.m_giga) <=
                  0.05 * exp.m_giga,
              std::string(exp.molecule) + ": M off by more than 5%");
      const double t_tol = std::max(0.05 * exp.t_days, 0.1);
      require(std::abs(it->t_days - exp.t_days) <= t_tol,
              std::string(exp.molecule) + ": t off tolerance");
    }
    return "11/11 molecules within tolerance";
  });

  criterion(2, "K reduction identities", [] {
    std::mt19937_64 rng(71);
    const auto h = testhelp::random_hamiltonian(rng, 5, 40);
    const auto vm = VarianceModel::upper_bound();
    const auto cm = CovarianceModel::zero();
    const double one_norm = h.coefficient_one_norm();
    const double ks = compute_k(h, group_singletons(h), vm, cm).k;
    require(std::abs(ks - one_norm * one_norm) < 1e-10 * ks,
            "singleton K != (sum|h|)^2");

    GroupingPlan one;
    one.method = GroupingMethod::qwc;
    one.n_qubits = h.n_qubits;
    Group g;
    for (std::size_t i = 0; i < h.terms.size(); ++i)
      g.term_indices.push_back(i);
    g.measurement_basis = std::string(h.n_qubits, 'Z');
    one.groups.push_back(g);
    double sq = 0.0;
    for (const auto& t : h.terms) sq += t.coefficient * t.coefficient;
    const double k1 = compute_k(h, one, vm, cm).k;
    require(std::abs(k1 - sq) < 1e-10 * sq, "one-group K != sum h^2");
    return "both identities exact";
  });

  criterion(3, "empirical variance law", [] {
    const auto h = h2_hamiltonian();
    const auto [energy, state] = ground_state(h);
    const auto plan = group_qwc(h);
    const auto ke = compute_k(h, plan, VarianceModel::from_state(state),
                              CovarianceModel::from_state(state));
    const std::uint64_t shots = 1000000;
    const auto alloc = allocate_shots(ke, shots);
    const auto rep = sample_plan(h, plan, state, alloc, 42);
    const double ratio = rep.empirical_variance * double(shots) / ke.k;
    require(ratio > 0.85 && ratio < 1.15,
            "variance*M / K = " + std::to_string(ratio));
    const double sigma = std::sqrt(rep.empirical_variance);
    require(std::abs(rep.energy_estimate - energy) < 5 * sigma,
            "estimate beyond 5 sigma");
    char buf[96];
    std::snprintf(buf, sizeof buf, "variance*M/K = %.4f at M = 1e6", ratio);
    return std::string(buf);
  });

  criterion(4, "encoding correctness", [] {
    const auto h = h2_hamiltonian();
    require(h.terms.size() == 14 && h.n_qubits == 4,
            "unexpected fixture encoding shape");
    const auto [e, state] = ground_state(h);
    require(std::abs(e - (-1.137270174657)) < 1e-8,
            "ground energy != FCI, got " + std::to_string(e));

    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 4; ++trial) {
      const auto mi = testhelp::random_integrals(rng, 2 + trial % 2, 2);
      const auto hr = jordan_wigner(mi);
      const auto m = dense_matrix(hr);
      require((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-10,
              "encoding not Hermitian");
      QubitHamiltonian num;
      num.n_qubits = hr.n_qubits;
      num.identity_offset = 0.5 * double(hr.n_qubits);
      for (std::size_t q = 0; q < hr.n_qubits; ++q) {
        PauliString z(hr.n_qubits);
        z.set_letter(q, 'Z');
        num.terms.push_back({z, -0.5});
      }
      const auto ab = hamiltonian_product(hr, num);
      const auto ba = hamiltonian_product(num, hr);
      PauliAccumulator diff(hr.n_qubits);
      for (const auto& [p, c] : ab.raw()) diff.add(p, c);
      for (const auto& [p, c] : ba.raw()) diff.add(p, -c);
      for (const auto& [p, c] : diff.raw())
        require(std::abs(c) < 1e-10, "[H, N] != 0");
    }
    return "FCI match 1e-8; Hermitian + number-conserving on randoms";
  });

  criterion(5, "basis-rotation exactness", [] {
    auto check = [](const MolecularIntegrals& mi) {
      const auto h = jordan_wigner(mi);
      auto fp = factorize_basis_rotation(mi, 0.0);
      require(fp.reconstruction_error < 1e-10,
              "tensor reconstruction error too large");
      auto plan = factorized_to_groups(fp, h);
      PauliAccumulator acc(h.n_qubits);
      for (const auto& g : plan.groups)
        acc.add(expand_group_to_original_frame(g, h.n_qubits));
      for (const auto& t : h.terms) acc.add(t.pauli, -t.coefficient);
      for (const auto& [p, c] : acc.raw())
        if (!p.is_identity())
          require(std::abs(c) < 1e-8, "round-trip deviation on " +
                                          p.to_string());
    };
    check(load_fcidump(testhelp::data_path("h2_sto3g.fcidump")));
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 5; ++trial)
      check(testhelp::random_integrals(rng, 2 + trial % 2, 2));
    return "h2 + 5 random sets round-trip to 1e-8";
  });

  criterion(6, "grouping invariants", [] {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + rng() % 7;
      const std::size_t max_terms =
          std::min<std::size_t>(200, (std::size_t(1) << (2 * n)) / 2);
      const auto h =
          testhelp::random_hamiltonian(rng, n, 1 + rng() % max_terms);
      const auto qwc = group_qwc(h);
      const auto anti = group_anticommuting(h);
      validate_partition(h, qwc);
      validate_partition(h, anti);
      for (const auto& g : qwc.groups)
        for (std::size_t i = 0; i < g.term_indices.size(); ++i)
          for (std::size_t j = i + 1; j < g.term_indices.size(); ++j)
            require(h.terms[g.term_indices[i]].pauli.qubit_wise_commutes(
                        h.terms[g.term_indices[j]].pauli),
                    "QWC group holds non-commuting pair");
      for (const auto& g : anti.groups)
        for (std::size_t i = 0; i < g.term_indices.size(); ++i)
          for (std::size_t j = i + 1; j < g.term_indices.size(); ++j)
            require(h.terms[g.term_indices[i]].pauli.anticommutes(
                        h.terms[g.term_indices[j]].pauli),
                    "anticommuting group holds commuting pair");
      const auto qwc2 = group_qwc(h);
      require(qwc.groups.size() == qwc2.groups.size(), "nondeterministic");
      for (std::size_t i = 0; i < qwc.groups.size(); ++i)
        require(qwc.groups[i].term_indices == qwc2.groups[i].term_indices,
                "nondeterministic");
      const auto vm = VarianceModel::upper_bound();
      const auto cm = CovarianceModel::zero();
      const double kq = compute_k(h, qwc, vm, cm).k;
      const double ks = compute_k(h, group_singletons(h), vm, cm).k;
      require(kq <= ks + 1e-9 * std::max(1.0, ks),
              "grouping increased K");
    }
    return "50 random Hamiltonians clean";
  });

  criterion(7, "constraint-shift contract", [] {
    const auto h = h2_hamiltonian();
    const auto [e, state] = ground_state(h);
    const auto cs = standard_constraints(4, 2, 0);
    std::mt19937_64 rng(89);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> alphas(cs.operators.size());
      for (auto& a : alphas) a = u(rng);
      require(std::abs(expectation(apply_shift(h, cs, alphas), state) - e) <
                  1e-10,
              "shift moved the sector energy");
    }

    const auto opt = optimize_shift(h, cs, GroupingMethod::qwc,
                                    VarianceModel::upper_bound(),
                                    CovarianceModel::zero(), 3000);
    require(opt.k_after <= opt.k_before + 1e-12, "h2: K increased");

    // 6-qubit random-sector instance
    const auto mi = testhelp::random_integrals(rng, 3, 2);
    const auto h6 = jordan_wigner(mi);
    const auto [e6, s6] = ground_state(h6);
    QubitHamiltonian num;
    num.n_qubits = 6;
    num.identity_offset = 3.0;
    for (std::size_t q = 0; q < 6; ++q) {
      PauliString z(6);
      z.set_letter(q, 'Z');
      num.terms.push_back({z, -0.5});
    }
    const int n_el = int(std::lround(expectation(num, s6)));
    // ground state must sit in a sharp particle-number sector
    const auto nsq = hamiltonian_product(num, num).finalize();
    require(std::abs(expectation(nsq, s6) -
                     expectation(num, s6) * expectation(num, s6)) < 1e-8,
            "random instance lacks a sharp sector");
    QubitHamiltonian sz;
    sz.n_qubits = 6;
    for (std::size_t p = 0; p < 3; ++p) {
      PauliString za(6), zb(6);
      za.set_letter(2 * p, 'Z');
      zb.set_letter(2 * p + 1, 'Z');
      sz.terms.push_back({zb, 0.25});
      sz.terms.push_back({za, -0.25});
    }
    const int ms2 = int(std::lround(2.0 * expectation(sz, s6)));
    const auto cs6 = standard_constraints(6, std::size_t(n_el), ms2);
    const auto opt6 = optimize_shift(h6, cs6, GroupingMethod::qwc,
                                     VarianceModel::upper_bound(),
                                     CovarianceModel::zero(), 3000);
    require(opt6.k_after <= opt6.k_before + 1e-12, "6-qubit: K increased");
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "reduction factors: h2 %.2fx, 6-qubit %.2fx",
                  opt.k_before / std::max(opt.k_after, 1e-300),
                  opt6.k_before / std::max(opt6.k_after, 1e-300));
    return std::string(buf);
  });

  criterion(8, "power-law fit recovery", [] {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> ua(0.01, 5.0), ub(0.5, 3.5);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = ua(rng), b = ub(rng);
      std::vector<ScalingPoint> pts;
      for (double n : {8.0, 12.0, 16.0, 24.0, 40.0})
        pts.push_back({n, a * std::pow(n, b)});
      auto fit = fit_power_law(pts);
      require(std::abs(fit.a - a) < 1e-10 * a && std::abs(fit.b - b) < 1e-10,
              "fit misses exact coefficients");
      std::shuffle(pts.begin(), pts.end(), rng);
      const auto fit2 = fit_power_law(pts);
      require(std::abs(fit2.a - fit.a) < 1e-12 * fit.a &&
                  std::abs(fit2.b - fit.b) < 1e-12,
              "fit depends on point order");
    }
    return "20 synthetic power laws recovered to 1e-10";
  });

  if (failures > 0)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all 8 criteria passed\n");
  return failures;
}
