#pragma once

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "ncsplit/errors.hpp"
#include "ncsplit/experiments.hpp"

namespace ncsplit {

// 17 significant digits: every double round-trips through text exactly.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw contract_error("parse_double: bad field '" + s + "'");
  return v;
}

// --- cpv table (per-mode columns mirror the violation study) ---------------

inline std::string cpv_csv_header() { return "r,n,iter,vio,dist"; }

inline std::string cpv_csv_row(std::size_t r, std::size_t n, const CpvRow& row) {
  return join_csv({std::to_string(r), std::to_string(n), std::to_string(row.iter),
                   std::to_string(row.vio), format_g17(row.dist)});
}

inline std::string cpv_all_csv_header() {
  return "r,n,iter_l0,vio_l0,dist_l0,iter_l1,vio_l1,dist_l1,iter_l0warm,vio_l0warm,dist_l0warm";
}

inline std::string cpv_all_csv_row(std::size_t r, std::size_t n, const CpvRow& l0, const CpvRow& l1,
                                   const CpvRow& warm) {
  return join_csv({std::to_string(r), std::to_string(n),
                   std::to_string(l0.iter), std::to_string(l0.vio), format_g17(l0.dist),
                   std::to_string(l1.iter), std::to_string(l1.vio), format_g17(l1.dist),
                   std::to_string(warm.iter), std::to_string(warm.vio), format_g17(warm.dist)});
}

// --- pcf table --------------------------------------------------------------

inline std::string pcf_csv_header() { return "tau,r,n,iter,card,err"; }

inline std::string pcf_csv_row(double tau, std::size_t r, std::size_t n, const PcfRow& row) {
  return join_csv({format_g17(tau), std::to_string(r), std::to_string(n), std::to_string(row.iter),
                   std::to_string(row.card), format_g17(row.err)});
}

// --- concave table ----------------------------------------------------------

inline std::string concave_csv_header() { return "n,lambda_max,beta_mult,iter,fval"; }

inline std::string concave_csv_row(std::size_t n, double lambda_max, const ConcaveRow& row) {
  return join_csv({std::to_string(n), format_g17(lambda_max), format_g17(row.beta_mult),
                   std::to_string(row.iter), format_g17(row.fval)});
}

}  // namespace ncsplit
