#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "shotcount/fcidump.hpp"

using namespace shotcount;
using Catch::Approx;

namespace {

std::string write_temp(const std::string& content) {
  static int counter = 0;
  const std::string path = "fcidump_test_" + std::to_string(counter++) +
                           ".tmp";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("h2 fixture loads with full symmetry expansion") {
  const auto mi = load_fcidump(testhelp::data_path("h2_sto3g.fcidump"));
  CHECK(mi.n_spatial_orbitals == 2);
  CHECK(mi.n_electrons == 2);
  CHECK(mi.two_m_s == 0);
  CHECK(mi.nuclear_repulsion == Approx(7.1375399335041823e-01).epsilon(1e-14));
  CHECK(mi.one_body(0, 0) == Approx(-1.2524635733533040).epsilon(1e-14));
  CHECK(mi.one_body(1, 1) == Approx(-0.47594871544068346).epsilon(1e-14));
  CHECK(mi.one_body(0, 1) == 0.0);
  CHECK(mi.eri(0, 0, 0, 0) == Approx(0.67448876628999688).epsilon(1e-14));
  // (11|22) record fills both (00|11)-style blocks
  CHECK(mi.eri(0, 0, 1, 1) == Approx(0.66346809636271153).epsilon(1e-14));
  CHECK(mi.eri(1, 1, 0, 0) == Approx(0.66346809636271153).epsilon(1e-14));
  // (12|12) spreads over all 8 permutations
  const double x = 0.18128880823111052;
  CHECK(mi.eri(0, 1, 0, 1) == Approx(x).epsilon(1e-14));
  CHECK(mi.eri(1, 0, 0, 1) == Approx(x).epsilon(1e-14));
  CHECK(mi.eri(0, 1, 1, 0) == Approx(x).epsilon(1e-14));
  CHECK(mi.eri(1, 0, 1, 0) == Approx(x).epsilon(1e-14));
  mi.validate();
}

TEST_CASE("fcidump error paths") {
  CHECK_THROWS_AS(load_fcidump("no_such_file.fcidump"), input_error);

  const auto bad_header = write_temp("NORB=2\n1.0 1 1 1 1\n");
  CHECK_THROWS_AS(load_fcidump(bad_header), input_error);
  std::remove(bad_header.c_str());

  const auto bad_record = write_temp(
      "&FCI NORB=2,NELEC=2,MS2=0,\n&END\nhello 1 1 1 1\n");
  CHECK_THROWS_AS(load_fcidump(bad_record), input_error);
  std::remove(bad_record.c_str());

  const auto bad_index = write_temp(
      "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 3 1 1 1\n");
  CHECK_THROWS_AS(load_fcidump(bad_index), input_error);
  std::remove(bad_index.c_str());

  const auto truncated = write_temp(
      "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 1 1\n");
  CHECK_THROWS_AS(load_fcidump(truncated), input_error);
  std::remove(truncated.c_str());
}

TEST_CASE("identity active-space restriction") {
  const auto mi = load_fcidump(testhelp::data_path("h2_sto3g.fcidump"));
  const auto same = active_space_restriction(mi, 0, 2);
  CHECK(same.n_electrons == 2);
  CHECK((same.one_body - mi.one_body).cwiseAbs().maxCoeff() == 0.0);
  CHECK(same.nuclear_repulsion == mi.nuclear_repulsion);
}

TEST_CASE("frozen-core dressing matches the explicit formula") {
  std::mt19937_64 rng(5);
  const auto mi = testhelp::random_integrals(rng, 4, 6);
  const auto act = active_space_restriction(mi, 1, 3);
  CHECK(act.n_spatial_orbitals == 3);
  CHECK(act.n_electrons == 4);

  double core = 2.0 * mi.one_body(0, 0) +
                2.0 * mi.eri(0, 0, 0, 0) - mi.eri(0, 0, 0, 0);
  CHECK(act.nuclear_repulsion ==
        Approx(mi.nuclear_repulsion + core).epsilon(1e-12));

  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q) {
      const double expect =
          mi.one_body(p + 1, q + 1) +
          2.0 * mi.eri(p + 1, q + 1, 0, 0) - mi.eri(p + 1, 0, 0, q + 1);
      CHECK(act.one_body(p, q) == Approx(expect).margin(1e-12));
    }
  CHECK(act.eri(0, 1, 2, 0) == Approx(mi.eri(1, 2, 3, 1)).margin(1e-14));
  act.validate();
}

TEST_CASE("restriction guards") {
  std::mt19937_64 rng(6);
  const auto mi = testhelp::random_integrals(rng, 3, 4);
  CHECK_THROWS_AS(active_space_restriction(mi, 2, 2), precondition_error);
  CHECK_THROWS_AS(active_space_restriction(mi, 3, 0), precondition_error);
}
