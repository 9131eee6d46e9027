#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shotcount/errors.hpp"
#include "shotcount/estimator.hpp"
#include "shotcount/grouping.hpp"
#include "shotcount/hamiltonian.hpp"
#include "shotcount/oracle.hpp"
#include "shotcount/scaling.hpp"

namespace shotcount {

using json = nlohmann::json;

inline json to_json(const QubitHamiltonian& h) {
  json terms = json::array();
  for (const auto& t : h.terms)
    terms.push_back({{"pauli", t.pauli.to_string()},
                     {"coefficient", t.coefficient}});
  return {{"n_qubits", h.n_qubits},
          {"identity_offset", h.identity_offset},
          {"terms", terms}};
}

inline QubitHamiltonian hamiltonian_from_json(const json& j) {
  QubitHamiltonian h;
  try {
    h.n_qubits = j.at("n_qubits").get<std::size_t>();
    h.identity_offset = j.at("identity_offset").get<double>();
    for (const auto& t : j.at("terms")) {
      const auto p =
          PauliString::from_text(t.at("pauli").get<std::string>());
      if (p.n_qubits() != h.n_qubits)
        throw input_error("hamiltonian json: term length mismatch on " +
                          p.to_string());
      h.terms.push_back({p, t.at("coefficient").get<double>()});
    }
  } catch (const json::exception& e) {
    throw input_error(std::string("hamiltonian json: ") + e.what());
  }
  return h;
}

inline json to_json(const GroupingPlan& plan) {
  json groups = json::array();
  for (const auto& g : plan.groups) {
    json jg;
    jg["terms"] = g.term_indices;
    jg["basis"] = g.measurement_basis.empty()
                      ? json(nullptr)
                      : json(g.measurement_basis);
    if (g.rotation) {
      json rot = json::array();
      for (Eigen::Index r = 0; r < g.rotation->rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < g.rotation->cols(); ++c)
          row.push_back((*g.rotation)(r, c));
        rot.push_back(std::move(row));
      }
      jg["rotation"] = std::move(rot);
    } else {
      jg["rotation"] = nullptr;
    }
    if (!g.local_terms.empty()) {
      json members = json::array();
      for (const auto& t : g.local_terms)
        members.push_back({{"pauli", t.pauli.to_string()},
                           {"coefficient", t.coefficient}});
      jg["members"] = std::move(members);
    }
    groups.push_back(std::move(jg));
  }
  return {{"method", to_string(plan.method)},
          {"n_qubits", plan.n_qubits},
          {"groups", groups}};
}

inline json to_json(const KEstimate& ke) {
  json groups = json::array();
  for (std::size_t i = 0; i < ke.group_masses.size(); ++i)
    groups.push_back({{"mass", ke.group_masses[i]},
                      {"shot_fraction", ke.shot_fractions[i]}});
  return {{"k", ke.k}, {"groups", groups}};
}

inline json to_json(const SamplingReport& rep) {
  return {{"total_shots", rep.total_shots},
          {"per_group_shots", rep.per_group_shots},
          {"energy_estimate", rep.energy_estimate},
          {"empirical_variance", rep.empirical_variance},
          {"seed", rep.seed}};
}

inline json to_json(const ScalingFit& fit) {
  return {{"a", fit.a},
          {"b", fit.b},
          {"rms_log_residual", fit.rms_log_residual}};
}

inline json to_json(const RuntimeEstimate& e) {
  return {{"molecule", e.molecule},
          {"n_electrons", e.n_electrons},
          {"n_qubits", e.n_qubits},
          {"k", e.k},
          {"measurements", e.measurements},
          {"t_seconds", e.t_seconds},
          {"t_days", e.t_days}};
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw input_error(path + ": " + e.what());
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
  }
  return fields;
}

inline double csv_number(const std::string& s, const std::string& path,
                         std::size_t lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw input_error(path + ":" + std::to_string(lineno) +
                      ": not a number: '" + s + "'");
  }
}

}  // namespace detail

/// CSV of fit points: "n_qubits,k" per line; a non-numeric first row is
/// treated as a header.
inline std::vector<ScalingPoint> load_scaling_points(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  std::vector<ScalingPoint> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split_csv_line(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty()))
      continue;
    if (points.empty() && lineno == 1) {
      try {
        std::size_t pos = 0;
        std::stod(fields[0], &pos);
      } catch (const std::exception&) {
        continue;  // header row
      }
    }
    if (fields.size() != 2)
      throw input_error(path + ":" + std::to_string(lineno) +
                        ": expected 'n_qubits,k'");
    points.push_back({detail::csv_number(fields[0], path, lineno),
                      detail::csv_number(fields[1], path, lineno)});
  }
  return points;
}

/// CSV of scaling coefficients: "molecule,n_el,a,b" per line, header row
/// optional.
inline std::vector<MoleculeRow> load_molecule_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open " + path);
  std::vector<MoleculeRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split_csv_line(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty()))
      continue;
    if (fields.size() != 4)
      throw input_error(path + ":" + std::to_string(lineno) +
                        ": expected 'molecule,n_el,a,b'");
    if (rows.empty() && lineno == 1) {
      try {
        std::size_t pos = 0;
        std::stod(fields[1], &pos);
      } catch (const std::exception&) {
        continue;  // header row
      }
    }
    MoleculeRow r;
    r.molecule = fields[0];
    r.n_electrons = static_cast<std::size_t>(
        detail::csv_number(fields[1], path, lineno));
    r.a = detail::csv_number(fields[2], path, lineno);
    r.b = detail::csv_number(fields[3], path, lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace shotcount
