#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "shotcount/estimator.hpp"
#include "shotcount/fcidump.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/jordan_wigner.hpp"
#include "shotcount/oracle.hpp"

using namespace shotcount;
using Catch::Approx;

TEST_CASE("apply_pauli against small dense matrices") {
  // Z on |0> and |1>
  Eigen::VectorXcd v0 = Eigen::VectorXcd::Zero(2), v1 = v0;
  v0[0] = 1.0;
  v1[1] = 1.0;
  CHECK(apply_pauli(pauli_from_text("Z"), v0)[0] ==
        std::complex<double>(1, 0));
  CHECK(apply_pauli(pauli_from_text("Z"), v1)[1] ==
        std::complex<double>(-1, 0));
  // X flips, Y flips with phase
  CHECK(apply_pauli(pauli_from_text("X"), v0)[1] ==
        std::complex<double>(1, 0));
  CHECK(apply_pauli(pauli_from_text("Y"), v0)[1] ==
        std::complex<double>(0, 1));
  CHECK(apply_pauli(pauli_from_text("Y"), v1)[0] ==
        std::complex<double>(0, -1));
}

TEST_CASE("expectation values") {
  Statevector s;
  s.n_qubits = 1;
  s.amplitudes = Eigen::VectorXcd::Zero(2);
  s.amplitudes[0] = 1.0;
  CHECK(expectation(pauli_from_text("Z"), s) == Approx(1.0));
  CHECK(expectation(pauli_from_text("X"), s) == Approx(0.0).margin(1e-14));
  s.amplitudes[0] = s.amplitudes[1] = 1.0 / std::sqrt(2.0);
  CHECK(expectation(pauli_from_text("X"), s) == Approx(1.0));
}

TEST_CASE("ground state of simple Hamiltonians") {
  QubitHamiltonian h;
  h.n_qubits = 1;
  h.terms.push_back({pauli_from_text("Z"), 1.0});
  const auto [e, s] = ground_state(h);
  CHECK(e == Approx(-1.0));
  CHECK(std::abs(s.amplitudes[1]) == Approx(1.0));

  // identity offset carries through
  QubitHamiltonian h2 = h;
  h2.identity_offset = 0.25;
  CHECK(ground_state(h2).first == Approx(-0.75));
}

TEST_CASE("lanczos path agrees on a separable 11-qubit Hamiltonian") {
  QubitHamiltonian h;
  h.n_qubits = 11;
  for (std::size_t q = 0; q < 11; ++q) {
    PauliString z(11);
    z.set_letter(q, 'Z');
    h.terms.push_back({z, 1.0 + 0.01 * double(q)});
  }
  const auto [e, s] = ground_state(h);
  double expected = 0.0;
  for (std::size_t q = 0; q < 11; ++q) expected -= 1.0 + 0.01 * double(q);
  CHECK(e == Approx(expected).margin(1e-9));
}

TEST_CASE("dense guard") {
  QubitHamiltonian h;
  h.n_qubits = 15;
  PauliString z(15);
  z.set_letter(0, 'Z');
  h.terms.push_back({z, 1.0});
  CHECK_THROWS_AS(ground_state(h), precondition_error);
}

TEST_CASE("sampling is deterministic and unbiased on one qubit") {
  QubitHamiltonian h;
  h.n_qubits = 1;
  h.terms.push_back({pauli_from_text("X"), 1.0});
  Statevector s;
  s.n_qubits = 1;
  s.amplitudes = Eigen::VectorXcd::Zero(2);
  // cos(0.3)|+-mix> so <X> = sin(0.6)... use explicit rotation instead:
  const double theta = 0.3;
  s.amplitudes[0] = std::cos(theta);
  s.amplitudes[1] = std::sin(theta);
  const double ex = std::sin(2 * theta);  // <X>

  const auto plan = group_singletons(h);
  const auto rep1 = sample_plan(h, plan, s, {200000}, 99);
  const auto rep2 = sample_plan(h, plan, s, {200000}, 99);
  CHECK(rep1.energy_estimate == rep2.energy_estimate);
  CHECK(rep1.empirical_variance == rep2.empirical_variance);
  const double sigma = std::sqrt((1 - ex * ex) / 200000.0);
  CHECK(std::abs(rep1.energy_estimate - ex) < 5 * sigma);

  const auto rep3 = sample_plan(h, plan, s, {200000}, 100);
  CHECK(rep3.energy_estimate != rep1.energy_estimate);
}

TEST_CASE("sampling rejects plans without per-qubit bases") {
  const auto h = jordan_wigner(
      load_fcidump(testhelp::data_path("h2_sto3g.fcidump")));
  const auto [e, state] = ground_state(h);
  const auto anti = group_anticommuting(h);
  std::vector<std::uint64_t> alloc(anti.groups.size(), 10);
  CHECK_THROWS_AS(sample_plan(h, anti, state, alloc, 1),
                  precondition_error);
}

TEST_CASE("zero shots on a live group is an error") {
  const auto h = jordan_wigner(
      load_fcidump(testhelp::data_path("h2_sto3g.fcidump")));
  const auto [e, state] = ground_state(h);
  const auto plan = group_qwc(h);
  std::vector<std::uint64_t> alloc(plan.groups.size(), 10);
  alloc[0] = 0;
  CHECK_THROWS_AS(sample_plan(h, plan, state, alloc, 1),
                  precondition_error);
}

TEST_CASE("variance law on the h2 fixture", "[slow]") {
  const auto h = jordan_wigner(
      load_fcidump(testhelp::data_path("h2_sto3g.fcidump")));
  const auto [energy, state] = ground_state(h);
  const auto plan = group_qwc(h);
  const auto ke = compute_k(h, plan, VarianceModel::from_state(state),
                            CovarianceModel::from_state(state));
  const std::uint64_t shots = 1000000;
  const auto alloc = allocate_shots(ke, shots);
  const auto rep = sample_plan(h, plan, state, alloc, 2024);
  const double ratio =
      rep.empirical_variance * double(shots) / ke.k;
  CHECK(ratio > 0.85);
  CHECK(ratio < 1.15);
  CHECK(std::abs(rep.energy_estimate - energy) <
        5 * std::sqrt(rep.empirical_variance));
}
