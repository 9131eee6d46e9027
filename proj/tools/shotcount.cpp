// shotcount: measurement-cost estimation for VQE-style Pauli Hamiltonians.
//
// Subcommands: encode, k, simulate, rdmc, fit, table2. All outputs are JSON
// (stdout or --output) and embed the run configuration for provenance.
// Exit codes: 0 success, 2 input error, 3 precondition/allocation error,
// 4 numerical-consistency error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shotcount/errors.hpp"
#include "shotcount/estimator.hpp"
#include "shotcount/factorize.hpp"
#include "shotcount/fcidump.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/jordan_wigner.hpp"
#include "shotcount/json_io.hpp"
#include "shotcount/oracle.hpp"
#include "shotcount/rdmc.hpp"
#include "shotcount/scaling.hpp"

namespace {

using shotcount::json;

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string method = "qwc";
  std::string variance = "upper";
  std::string covariance = "zero";
  std::string fcidump;
  std::string output;
  double epsilon = 5e-4;
  double rdmc_factor = 2.0;
  double threshold = 0.0;
  bool ground_state = false;
  bool rdmc = false;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 2000;
  std::size_t freeze_core = 0;
  std::int64_t active = -1;
  std::int64_t n_electrons = -1;
  std::int64_t ms2 = 0;

  json echo() const {
    return {{"subcommand", subcommand},
            {"input", input},
            {"method", method},
            {"variance", variance},
            {"covariance", covariance},
            {"fcidump", fcidump},
            {"output", output},
            {"epsilon", epsilon},
            {"rdmc_factor", rdmc_factor},
            {"threshold", threshold},
            {"ground_state", ground_state},
            {"rdmc", rdmc},
            {"shots", shots},
            {"seed", seed},
            {"budget", budget},
            {"freeze_core", freeze_core},
            {"active", active},
            {"n_electrons", n_electrons},
            {"ms2", ms2}};
  }
};

shotcount::GroupingMethod parse_method(const std::string& s) {
  if (s == "none") return shotcount::GroupingMethod::none;
  if (s == "qwc") return shotcount::GroupingMethod::qwc;
  if (s == "anticommuting") return shotcount::GroupingMethod::anticommuting;
  if (s == "basis-rotation" || s == "basis_rotation")
    return shotcount::GroupingMethod::basis_rotation;
  throw shotcount::input_error("unknown grouping method '" + s + "'");
}

void emit(const json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(output);
  if (!out) throw shotcount::input_error("cannot write " + output);
  out << j.dump(2) << "\n";
}

int cmd_encode(const RunConfig& cfg) {
  auto mi = shotcount::load_fcidump(cfg.input);
  const std::size_t active =
      cfg.active < 0 ? mi.n_spatial_orbitals - cfg.freeze_core
                     : static_cast<std::size_t>(cfg.active);
  if (cfg.freeze_core > 0 || active != mi.n_spatial_orbitals)
    mi = shotcount::active_space_restriction(mi, cfg.freeze_core, active);
  const auto h = shotcount::jordan_wigner(mi);
  json out = shotcount::to_json(h);
  out["n_electrons"] = mi.n_electrons;
  out["ms2"] = mi.two_m_s;
  out["config"] = cfg.echo();
  emit(out, cfg.output);
  return 0;
}

struct ModelContext {
  std::optional<shotcount::Statevector> state;
  shotcount::VarianceModel vm = shotcount::VarianceModel::upper_bound();
  shotcount::CovarianceModel cm = shotcount::CovarianceModel::zero();
};

ModelContext build_models(const RunConfig& cfg,
                          const shotcount::QubitHamiltonian& h) {
  ModelContext ctx;
  const bool need_state =
      cfg.variance == "state" || cfg.covariance == "state";
  if (need_state) {
    if (!cfg.ground_state)
      throw shotcount::precondition_error(
          "from-state models need --ground-state");
    ctx.state = shotcount::ground_state(h).second;
  }
  if (cfg.variance == "state")
    ctx.vm = shotcount::VarianceModel::from_state(*ctx.state);
  else if (cfg.variance != "upper")
    throw shotcount::input_error("unknown variance model '" + cfg.variance +
                                 "'");
  if (cfg.covariance == "state")
    ctx.cm = shotcount::CovarianceModel::from_state(*ctx.state);
  else if (cfg.covariance != "zero")
    throw shotcount::input_error("unknown covariance model '" +
                                 cfg.covariance + "'");
  return ctx;
}

shotcount::ConstraintSet constraints_for(
    const RunConfig& cfg, const shotcount::QubitHamiltonian& h,
    const json& ham_json) {
  std::int64_t n_el = cfg.n_electrons;
  std::int64_t ms2 = cfg.ms2;
  if (n_el < 0 && ham_json.contains("n_electrons")) {
    n_el = ham_json["n_electrons"].get<std::int64_t>();
    if (ham_json.contains("ms2")) ms2 = ham_json["ms2"].get<std::int64_t>();
  }
  if (n_el < 0 && !cfg.fcidump.empty()) {
    const auto mi = shotcount::load_fcidump(cfg.fcidump);
    n_el = static_cast<std::int64_t>(mi.n_electrons);
    ms2 = mi.two_m_s;
  }
  if (n_el < 0)
    throw shotcount::precondition_error(
        "constraint shift needs the electron count: pass --n-electrons "
        "(and --ms2), or an encode-produced Hamiltonian JSON");
  return shotcount::standard_constraints(
      h.n_qubits, static_cast<std::size_t>(n_el), static_cast<int>(ms2));
}

int cmd_k(const RunConfig& cfg) {
  const json ham_json = shotcount::load_json_file(cfg.input);
  const auto h = shotcount::hamiltonian_from_json(ham_json);
  const auto method = parse_method(cfg.method);
  const auto ctx = build_models(cfg, h);

  json out;
  out["config"] = cfg.echo();

  shotcount::GroupingPlan plan;
  if (method == shotcount::GroupingMethod::basis_rotation) {
    if (cfg.rdmc)
      throw shotcount::precondition_error(
          "--rdmc is not available with basis-rotation grouping");
    if (cfg.fcidump.empty())
      throw shotcount::precondition_error(
          "basis-rotation grouping needs --fcidump");
    const auto mi = shotcount::load_fcidump(cfg.fcidump);
    auto fp = shotcount::factorize_basis_rotation(mi, cfg.threshold);
    plan = shotcount::factorized_to_groups(fp, h);
    out["factorization"] = {
        {"n_factors", fp.two_body_factors.size()},
        {"reconstruction_error", fp.reconstruction_error},
        {"truncated_weight", fp.truncated_weight}};
  } else {
    plan = shotcount::plan_for_method(h, method);
  }

  if (cfg.rdmc) {
    const auto cs = constraints_for(cfg, h, ham_json);
    const auto shift = shotcount::optimize_shift(h, cs, method, ctx.vm,
                                                 ctx.cm, cfg.budget);
    const auto plan_after =
        shotcount::plan_for_method(shift.shifted, method);
    const auto ke = shotcount::compute_k(shift.shifted, plan_after, ctx.vm,
                                         ctx.cm);
    out["k"] = ke.k;
    out["k_before"] = shift.k_before;
    out["k_after"] = shift.k_after;
    out["reduction_factor"] =
        shift.k_after > 0 ? shift.k_before / shift.k_after : 0.0;
    out["alphas"] = shift.alphas;
    out["budget_exhausted"] = shift.budget_exhausted;
    out["evaluations"] = shift.evaluations;
    out["measurements"] = shotcount::measurement_count(ke.k, cfg.epsilon);
    out["groups"] = shotcount::to_json(ke)["groups"];
  } else {
    const auto ke = shotcount::compute_k(h, plan, ctx.vm, ctx.cm);
    out["k"] = ke.k;
    out["measurements"] = shotcount::measurement_count(ke.k, cfg.epsilon);
    out["n_groups"] = plan.groups.size();
    out["groups"] = shotcount::to_json(ke)["groups"];
  }
  out["method"] = cfg.method;
  emit(out, cfg.output);
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const json ham_json = shotcount::load_json_file(cfg.input);
  const auto h = shotcount::hamiltonian_from_json(ham_json);
  const auto method = parse_method(cfg.method);
  if (method != shotcount::GroupingMethod::qwc &&
      method != shotcount::GroupingMethod::none)
    throw shotcount::precondition_error(
        "simulate supports per-qubit measurable plans only (none, qwc)");

  const auto [energy, state] = shotcount::ground_state(h);
  const auto plan = shotcount::plan_for_method(h, method);
  const auto vm = shotcount::VarianceModel::from_state(state);
  const auto cm = shotcount::CovarianceModel::from_state(state);
  const auto ke = shotcount::compute_k(h, plan, vm, cm);
  const auto allocation = shotcount::allocate_shots(ke, cfg.shots);
  const auto rep =
      shotcount::sample_plan(h, plan, state, allocation, cfg.seed);

  json out = shotcount::to_json(rep);
  out["k"] = ke.k;
  out["exact_energy"] = energy;
  out["variance_times_shots"] =
      rep.empirical_variance * double(rep.total_shots);
  out["method"] = cfg.method;
  out["config"] = cfg.echo();
  emit(out, cfg.output);
  return 0;
}

int cmd_rdmc(const RunConfig& cfg) {
  const json ham_json = shotcount::load_json_file(cfg.input);
  const auto h = shotcount::hamiltonian_from_json(ham_json);
  const auto method = parse_method(cfg.method);
  const auto ctx = build_models(cfg, h);
  const auto cs = constraints_for(cfg, h, ham_json);
  const auto shift =
      shotcount::optimize_shift(h, cs, method, ctx.vm, ctx.cm, cfg.budget);

  json out;
  out["k_before"] = shift.k_before;
  out["k_after"] = shift.k_after;
  out["reduction_factor"] =
      shift.k_after > 0 ? shift.k_before / shift.k_after : 0.0;
  out["alphas"] = shift.alphas;
  out["budget_exhausted"] = shift.budget_exhausted;
  out["evaluations"] = shift.evaluations;
  out["shifted_hamiltonian"] = shotcount::to_json(shift.shifted);
  out["method"] = cfg.method;
  out["config"] = cfg.echo();
  emit(out, cfg.output);
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  const auto points = shotcount::load_scaling_points(cfg.input);
  if (points.empty())
    throw shotcount::input_error(cfg.input + ": no data rows");
  const auto fit = shotcount::fit_power_law(points);
  json out = shotcount::to_json(fit);
  out["n_points"] = points.size();
  out["config"] = cfg.echo();
  emit(out, cfg.output);
  return 0;
}

int cmd_table2(const RunConfig& cfg) {
  const auto rows = shotcount::load_molecule_rows(cfg.input);
  if (rows.empty())
    throw shotcount::input_error(cfg.input + ": no data rows");
  const auto report =
      shotcount::table2_pipeline(rows, cfg.epsilon, cfg.rdmc_factor);
  json jrows = json::array();
  for (const auto& e : report) jrows.push_back(shotcount::to_json(e));
  json out;
  out["rows"] = std::move(jrows);
  out["config"] = cfg.echo();
  emit(out, cfg.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement (shot) cost estimation for Pauli Hamiltonians"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* enc = app.add_subcommand("encode",
                                 "FCIDUMP -> Jordan-Wigner Hamiltonian JSON");
  enc->add_option("fcidump", cfg.input, "FCIDUMP file")->required();
  enc->add_option("--freeze-core", cfg.freeze_core,
                  "number of frozen core orbitals");
  enc->add_option("--active", cfg.active, "number of active orbitals");
  enc->add_option("-o,--output", cfg.output, "output JSON path");

  auto* k = app.add_subcommand("k", "measurement constant K for a plan");
  k->add_option("hamiltonian", cfg.input, "Hamiltonian JSON")->required();
  k->add_option("--method", cfg.method,
                "none|qwc|anticommuting|basis-rotation")
      ->required();
  k->add_option("--variance", cfg.variance, "upper|state");
  k->add_option("--covariance", cfg.covariance, "zero|state");
  k->add_flag("--ground-state", cfg.ground_state,
              "evaluate state models on the exact ground state");
  k->add_option("--fcidump", cfg.fcidump,
                "integrals file (basis-rotation, or electron counts)");
  k->add_option("--threshold", cfg.threshold,
                "basis-rotation truncation threshold");
  k->add_flag("--rdmc", cfg.rdmc, "optimize a symmetry-constraint shift");
  k->add_option("--budget", cfg.budget, "shift optimizer evaluation budget");
  k->add_option("--n-electrons", cfg.n_electrons,
                "electron count for constraint targets");
  k->add_option("--ms2", cfg.ms2, "2*Ms for constraint targets");
  k->add_option("--epsilon", cfg.epsilon, "target std deviation (Hartree)");
  k->add_option("-o,--output", cfg.output, "output JSON path");

  auto* sim = app.add_subcommand("simulate",
                                 "shot-sampling run on the ground state");
  sim->add_option("hamiltonian", cfg.input, "Hamiltonian JSON")->required();
  sim->add_option("--method", cfg.method, "none|qwc");
  sim->add_option("--shots", cfg.shots, "total shot budget")->required();
  sim->add_option("--seed", cfg.seed, "RNG seed");
  sim->add_option("-o,--output", cfg.output, "output JSON path");

  auto* rd = app.add_subcommand("rdmc", "symmetry-constraint shift report");
  rd->add_option("hamiltonian", cfg.input, "Hamiltonian JSON")->required();
  rd->add_option("--method", cfg.method, "none|qwc|anticommuting");
  rd->add_option("--variance", cfg.variance, "upper|state");
  rd->add_option("--covariance", cfg.covariance, "zero|state");
  rd->add_flag("--ground-state", cfg.ground_state,
               "evaluate state models on the exact ground state");
  rd->add_option("--budget", cfg.budget, "optimizer evaluation budget");
  rd->add_option("--n-electrons", cfg.n_electrons,
                 "electron count for constraint targets");
  rd->add_option("--ms2", cfg.ms2, "2*Ms for constraint targets");
  rd->add_option("--fcidump", cfg.fcidump,
                 "integrals file for electron counts");
  rd->add_option("-o,--output", cfg.output, "output JSON path");

  auto* fit = app.add_subcommand("fit", "power-law fit of (n_qubits, K)");
  fit->add_option("points", cfg.input, "CSV of n_qubits,k")->required();
  fit->add_option("-o,--output", cfg.output, "output JSON path");

  auto* t2 = app.add_subcommand("table2", "runtime extrapolation report");
  t2->add_option("coefficients", cfg.input, "CSV of molecule,n_el,a,b")
      ->required();
  t2->add_option("--epsilon", cfg.epsilon,
                 "target std deviation (Hartree)");
  t2->add_option("--rdmc-factor", cfg.rdmc_factor,
                 "variance reduction factor");
  t2->add_option("-o,--output", cfg.output, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (enc->parsed()) { cfg.subcommand = "encode"; return cmd_encode(cfg); }
    if (k->parsed()) { cfg.subcommand = "k"; return cmd_k(cfg); }
    if (sim->parsed()) { cfg.subcommand = "simulate"; return cmd_simulate(cfg); }
    if (rd->parsed()) { cfg.subcommand = "rdmc"; return cmd_rdmc(cfg); }
    if (fit->parsed()) { cfg.subcommand = "fit"; return cmd_fit(cfg); }
    if (t2->parsed()) { cfg.subcommand = "table2"; return cmd_table2(cfg); }
  } catch (const shotcount::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const shotcount::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const shotcount::consistency_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
