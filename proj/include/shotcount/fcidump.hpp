#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shotcount/errors.hpp"

namespace shotcount {

/// One-/two-electron integrals in chemist notation (pq|rs), Hartree.
struct MolecularIntegrals {
  std::size_t n_spatial_orbitals = 0;
  double nuclear_repulsion = 0.0;
  Eigen::MatrixXd one_body;         // h_pq, symmetric
  std::vector<double> two_body;     // (pq|rs), 8-fold symmetric, n^4 dense
  std::size_t n_electrons = 0;
  int two_m_s = 0;

  double& eri(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
    const std::size_t n = n_spatial_orbitals;
    return two_body[((p * n + q) * n + r) * n + s];
  }
  double eri(std::size_t p, std::size_t q, std::size_t r,
             std::size_t s) const {
    const std::size_t n = n_spatial_orbitals;
    return two_body[((p * n + q) * n + r) * n + s];
  }

  void validate(double tol = 1e-10) const {
    const std::size_t n = n_spatial_orbitals;
    if (n_electrons > 2 * n)
      throw precondition_error("integrals: n_electrons exceeds 2*n_orbitals");
    if (static_cast<std::size_t>(one_body.rows()) != n ||
        static_cast<std::size_t>(one_body.cols()) != n)
      throw precondition_error("integrals: one_body shape mismatch");
    if (two_body.size() != n * n * n * n)
      throw precondition_error("integrals: two_body size mismatch");
    if ((one_body - one_body.transpose()).cwiseAbs().maxCoeff() > tol)
      throw consistency_error("integrals: one_body not symmetric");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s) {
            const double v = eri(p, q, r, s);
            if (std::abs(v - eri(q, p, r, s)) > tol ||
                std::abs(v - eri(p, q, s, r)) > tol ||
                std::abs(v - eri(r, s, p, q)) > tol)
              throw consistency_error(
                  "integrals: two_body breaks chemist permutation symmetry");
          }
  }
};

namespace detail {

inline std::size_t parse_header_int(const std::string& header,
                                    const std::string& key) {
  auto pos = header.find(key);
  if (pos == std::string::npos)
    throw input_error("fcidump: header missing " + key);
  pos += key.size();
  while (pos < header.size() && (header[pos] == '=' || header[pos] == ' '))
    ++pos;
  std::size_t end = pos;
  if (end < header.size() && (header[end] == '-' || header[end] == '+')) ++end;
  while (end < header.size() && std::isdigit(header[end])) ++end;
  if (end == pos) throw input_error("fcidump: malformed value for " + key);
  return static_cast<std::size_t>(std::stoll(header.substr(pos, end - pos)));
}

inline long long parse_header_signed(const std::string& header,
                                     const std::string& key) {
  auto pos = header.find(key);
  if (pos == std::string::npos)
    throw input_error("fcidump: header missing " + key);
  pos += key.size();
  while (pos < header.size() && (header[pos] == '=' || header[pos] == ' '))
    ++pos;
  std::size_t end = pos;
  if (end < header.size() && (header[end] == '-' || header[end] == '+')) ++end;
  while (end < header.size() && std::isdigit(header[end])) ++end;
  if (end == pos) throw input_error("fcidump: malformed value for " + key);
  return std::stoll(header.substr(pos, end - pos));
}

}  // namespace detail

/// Reads an FCIDUMP file: `&FCI NORB=.., NELEC=.., MS2=..` header
/// (terminated by `&END` or `/`), then whitespace-separated
/// `value i j k l` records with 1-based indices in chemist notation.
/// The i=j=k=l=0 record is the core / nuclear-repulsion constant.
inline MolecularIntegrals load_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("fcidump: cannot open '" + path + "'");

  std::string line;
  std::string header;
  std::size_t line_no = 0;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++line_no;
    header += " " + line;
    if (line.find("&END") != std::string::npos ||
        line.find("/") != std::string::npos)
      header_done = true;
  }
  if (header.find("&FCI") == std::string::npos)
    throw input_error("fcidump: missing &FCI header");
  if (!header_done) throw input_error("fcidump: header never terminated");

  MolecularIntegrals mi;
  mi.n_spatial_orbitals = detail::parse_header_int(header, "NORB");
  mi.n_electrons = detail::parse_header_int(header, "NELEC");
  mi.two_m_s = static_cast<int>(detail::parse_header_signed(header, "MS2"));
  const std::size_t n = mi.n_spatial_orbitals;
  if (n == 0) throw input_error("fcidump: NORB must be positive");
  mi.one_body = Eigen::MatrixXd::Zero(n, n);
  mi.two_body.assign(n * n * n * n, 0.0);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string first;
    if (!(std::istringstream(line) >> first)) continue;  // blank line
    double value;
    long long i, j, k, l;
    if (!(ss >> value))
      throw input_error("fcidump: non-numeric record at line " +
                        std::to_string(line_no));
    if (!(ss >> i >> j >> k >> l))
      throw input_error("fcidump: truncated record at line " +
                        std::to_string(line_no));
    auto check = [&](long long idx) {
      if (idx < 0 || idx > static_cast<long long>(n))
        throw input_error("fcidump: orbital index " + std::to_string(idx) +
                          " out of range at line " + std::to_string(line_no));
    };
    check(i), check(j), check(k), check(l);
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      mi.nuclear_repulsion = value;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0)
        throw input_error("fcidump: bad one-body indices at line " +
                          std::to_string(line_no));
      mi.one_body(i - 1, j - 1) = value;
      mi.one_body(j - 1, i - 1) = value;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw input_error("fcidump: bad two-body indices at line " +
                          std::to_string(line_no));
      const std::size_t p = i - 1, q = j - 1, r = k - 1, s = l - 1;
      // expand the stored unique element over the 8-fold symmetry
      const std::size_t idx[8][4] = {{p, q, r, s}, {q, p, r, s}, {p, q, s, r},
                                     {q, p, s, r}, {r, s, p, q}, {s, r, p, q},
                                     {r, s, q, p}, {s, r, q, p}};
      for (const auto& t : idx) mi.eri(t[0], t[1], t[2], t[3]) = value;
    }
  }
  mi.validate();
  return mi;
}

/// Restricts to the active window [n_frozen_core, n_frozen_core+n_active):
/// frozen-core one-body dressing h'_pq = h_pq + sum_c [2(pq|cc) - (pc|cq)]
/// and the core energy folded into nuclear_repulsion.
inline MolecularIntegrals active_space_restriction(
    const MolecularIntegrals& mi, std::size_t n_frozen_core,
    std::size_t n_active_spatial) {
  const std::size_t n = mi.n_spatial_orbitals;
  if (n_frozen_core + n_active_spatial > n)
    throw precondition_error(
        "active space: window exceeds orbital count");
  if (mi.n_electrons < 2 * n_frozen_core)
    throw precondition_error(
        "active space: fewer electrons than frozen-core occupation");

  MolecularIntegrals out;
  out.n_spatial_orbitals = n_active_spatial;
  out.n_electrons = mi.n_electrons - 2 * n_frozen_core;
  out.two_m_s = mi.two_m_s;
  out.one_body = Eigen::MatrixXd::Zero(n_active_spatial, n_active_spatial);
  out.two_body.assign(
      n_active_spatial * n_active_spatial * n_active_spatial *
          n_active_spatial,
      0.0);

  double core_energy = 0.0;
  for (std::size_t c = 0; c < n_frozen_core; ++c) {
    core_energy += 2.0 * mi.one_body(c, c);
    for (std::size_t d = 0; d < n_frozen_core; ++d)
      core_energy += 2.0 * mi.eri(c, c, d, d) - mi.eri(c, d, d, c);
  }
  out.nuclear_repulsion = mi.nuclear_repulsion + core_energy;

  const std::size_t off = n_frozen_core;
  for (std::size_t p = 0; p < n_active_spatial; ++p)
    for (std::size_t q = 0; q < n_active_spatial; ++q) {
      double h = mi.one_body(off + p, off + q);
      for (std::size_t c = 0; c < n_frozen_core; ++c)
        h += 2.0 * mi.eri(off + p, off + q, c, c) -
             mi.eri(off + p, c, c, off + q);
      out.one_body(p, q) = h;
    }
  for (std::size_t p = 0; p < n_active_spatial; ++p)
    for (std::size_t q = 0; q < n_active_spatial; ++q)
      for (std::size_t r = 0; r < n_active_spatial; ++r)
        for (std::size_t s = 0; s < n_active_spatial; ++s)
          out.eri(p, q, r, s) = mi.eri(off + p, off + q, off + r, off + s);
  return out;
}

}  // namespace shotcount
