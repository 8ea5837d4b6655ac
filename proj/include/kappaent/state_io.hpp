#pragma once

// File interchange: JSON state files with split real/imaginary parts, the
// CSV sweep format, and JSON serialization of measure reports. The state
// file is the single interchange representation; builders never read files.
//
// StateFile schema:
//   { "dimA": int, "dimB": int,
//     "re": [[...], ...],   // (dimA*dimB)^2 reals, row-major
//     "im": [[...], ...] }

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kappaent/linalg.hpp"
#include "kappaent/measures.hpp"
#include "kappaent/states.hpp"

namespace kappaent {

/// Input that fails schema or density-matrix validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline RMat parse_square(const nlohmann::json& j, const char* key, Index side) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ValidationError(std::string("state file: missing matrix field '") + key + "'");
  }
  const auto& rows = j[key];
  if (static_cast<Index>(rows.size()) != side) {
    throw ValidationError(std::string("state file: '") + key + "' has wrong row count");
  }
  RMat m(side, side);
  for (Index r = 0; r < side; ++r) {
    const auto& row = rows[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != side) {
      throw ValidationError(std::string("state file: '") + key + "' row " +
                            std::to_string(r) + " has wrong length");
    }
    for (Index c = 0; c < side; ++c) {
      const auto& v = row[static_cast<size_t>(c)];
      if (!v.is_number()) {
        throw ValidationError(std::string("state file: '") + key + "' holds a non-number");
      }
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Parses a matrix in StateFile layout. With validate_density set, the
/// reconstructed matrix must pass Hermitian 1e-10 / PSD 1e-8 / trace 1e-8.
inline BipartiteOperator read_state_json(const nlohmann::json& j, bool validate_density) {
  if (!j.contains("dimA") || !j.contains("dimB") || !j["dimA"].is_number_integer() ||
      !j["dimB"].is_number_integer()) {
    throw ValidationError("state file: dimA/dimB missing or not integers");
  }
  const Index da = j["dimA"].get<Index>();
  const Index db = j["dimB"].get<Index>();
  if (da < 1 || db < 1) throw ValidationError("state file: dimensions must be >= 1");
  const Index side = da * db;
  const RMat re = detail::parse_square(j, "re", side);
  const RMat im = detail::parse_square(j, "im", side);
  CMat m = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  BipartiteOperator op{std::move(m), da, db};
  if (validate_density) {
    try {
      require_density_matrix(op, 1e-10, 1e-8, 1e-8);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("state file: ") + e.what());
    }
  }
  return op;
}

inline BipartiteOperator read_state_file(const std::string& path, bool validate_density = true) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open state file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("state file is not valid JSON: " + std::string(e.what()));
  }
  return read_state_json(j, validate_density);
}

inline nlohmann::json state_to_json(const BipartiteOperator& op) {
  nlohmann::json j;
  j["dimA"] = op.dim_a;
  j["dimB"] = op.dim_b;
  const Index side = op.dim();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Index r = 0; r < side; ++r) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Index c = 0; c < side; ++c) {
      rr.push_back(op.mat(r, c).real());
      ri.push_back(op.mat(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

/// Fixed 9-significant-digit formatting shared by CSV and key-value output;
/// keeps regression diffs byte-stable while exceeding every acceptance
/// tolerance.
inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

/// The -infinity sentinel never leaks as a float; it serializes as "-inf".
inline std::string format_bound(const std::optional<double>& lower) {
  return lower ? format_g9(*lower) : std::string("-inf");
}

inline nlohmann::json report_to_json(const MeasureReport& r) {
  nlohmann::json j;
  j["e_kappa_primal"] = r.e_kappa_primal;
  j["e_kappa_dual"] = r.e_kappa_dual;
  j["e_n"] = r.e_n;
  j["log2_z"] = r.log2_z;
  if (r.one_shot_lower) {
    j["one_shot_lower"] = *r.one_shot_lower;
  } else {
    j["one_shot_lower"] = "-inf";
  }
  j["one_shot_upper"] = r.one_shot_upper;
  j["binegativity_holds"] = r.binegativity;
  auto diag = [](const SolveDiagnostics& d) {
    nlohmann::json x;
    x["status"] = to_string(d.status);
    x["gap"] = d.gap;
    x["primal_residual"] = d.primal_residual;
    x["dual_residual"] = d.dual_residual;
    x["iterations"] = d.iterations;
    return x;
  };
  j["primal_solver"] = diag(r.primal_diagnostics);
  j["dual_solver"] = diag(r.dual_diagnostics);
  return j;
}

/// One grid point of a parameter sweep.
struct SweepRecord {
  std::string family;
  double p = 0.0;
  double e_kappa = 0.0;
  double e_n = 0.0;
  double log2_z = 0.0;
  double gap = 0.0;  // e_kappa - e_n
};

inline std::string sweep_csv_header() { return "family,p,e_kappa,e_n,log2_z,gap"; }

inline std::string to_csv_row(const SweepRecord& r) {
  return r.family + "," + format_g9(r.p) + "," + format_g9(r.e_kappa) + "," +
         format_g9(r.e_n) + "," + format_g9(r.log2_z) + "," + format_g9(r.gap);
}

/// Writes a whole text file through a temporary sibling and renames it into
/// place, so failures never leave a partial file behind.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write to " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace kappaent
