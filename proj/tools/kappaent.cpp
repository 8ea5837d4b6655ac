// Command-line front end: compute measures for named or file-loaded states,
// run parameter sweeps, certify one-shot preparation costs, run the property
// batteries and emit CSV.
//
// Exit codes: 0 success, 1 validation error, 2 solver failure,
//             3 certificate/property integrity failure.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "kappaent/channels.hpp"
#include "kappaent/checks.hpp"
#include "kappaent/measures.hpp"
#include "kappaent/state_io.hpp"
#include "kappaent/states.hpp"

namespace {

using namespace kappaent;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIntegrity = 3;

BipartiteOperator resolve_state(const std::string& ref) {
  const auto colon = ref.find(':');
  const std::string head = ref.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : ref.substr(colon + 1);
  auto parse_p = [&](const char* who) {
    try {
      size_t used = 0;
      const double p = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument("trailing characters");
      return p;
    } catch (const std::exception&) {
      throw ValidationError(std::string(who) + ": expected numeric parameter, got '" + arg + "'");
    }
  };
  if (ref == "rho_v") return antisym_rank2();
  if (head == "phi" && !arg.empty()) {
    int d = 0;
    try {
      d = std::stoi(arg);
    } catch (const std::exception&) {
      throw ValidationError("phi: expected integer dimension, got '" + arg + "'");
    }
    if (d < 1) throw ValidationError("phi: dimension must be >= 1");
    return max_entangled(d);
  }
  if (head == "sigma" && !arg.empty()) return family_sigma(parse_p("sigma"));
  if (head == "omega" && !arg.empty()) return family_omega(parse_p("omega"));
  if (head == "tau" && !arg.empty()) return family_tau(parse_p("tau"));
  if (head == "convexity") {
    const ConvexityTrio trio = convexity_trio();
    if (arg == "1") return trio.rho1;
    if (arg == "2") return trio.rho2;
    if (arg == "avg") return trio.average;
    throw ValidationError("convexity: expected one of {1, 2, avg}");
  }
  if (head == "monogamy") {
    const MonogamyState mono = monogamy_state();
    if (arg == "ab") return mono.psi_ab;
    if (arg == "ac") return mono.psi_ac;
    if (arg == "abc") return mono.psi_a_bc;
    throw ValidationError("monogamy: expected one of {ab, ac, abc}");
  }
  return read_state_file(ref);
}

int run_measure(const std::string& ref, bool as_json, const SdpOptions& opts) {
  const BipartiteOperator rho = resolve_state(ref);
  const MeasureReport r = measure_report(rho, opts);
  if (as_json) {
    std::cout << report_to_json(r).dump(2) << '\n';
    return kExitOk;
  }
  std::cout << "e_kappa_primal = " << format_g9(r.e_kappa_primal) << '\n'
            << "e_kappa_dual = " << format_g9(r.e_kappa_dual) << '\n'
            << "e_n = " << format_g9(r.e_n) << '\n'
            << "log2_z = " << format_g9(r.log2_z) << '\n'
            << "one_shot_lower = " << format_bound(r.one_shot_lower) << '\n'
            << "one_shot_upper = " << format_g9(r.one_shot_upper) << '\n'
            << "binegativity_holds = " << (r.binegativity ? "true" : "false") << '\n'
            << "primal_solver = " << to_string(r.primal_diagnostics.status) << " gap "
            << format_g9(r.primal_diagnostics.gap) << " iters "
            << r.primal_diagnostics.iterations << '\n'
            << "dual_solver = " << to_string(r.dual_diagnostics.status) << " gap "
            << format_g9(r.dual_diagnostics.gap) << " iters "
            << r.dual_diagnostics.iterations << '\n';
  return kExitOk;
}

unsigned sweep_thread_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("KAPPA_ENT_THREADS");
  if (!env || !*env) return hw;
  try {
    const long v = std::stol(env);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
  } catch (const std::exception&) {
  }
  return hw;
}

int run_sweep(const std::string& family, double p0, double p1, int steps,
              const std::string& out_path, const SdpOptions& opts) {
  if (family != "sigma" && family != "omega" && family != "tau") {
    throw ValidationError("sweep: family must be one of {sigma, omega, tau}");
  }
  if (!(p0 >= 0.0 && p0 <= p1 && p1 <= 1.0)) {
    throw ValidationError("sweep: need 0 <= p_start <= p_end <= 1");
  }
  if (steps < 1 || (steps == 1 && p0 != p1) || (steps >= 2 && p0 == p1)) {
    throw ValidationError("sweep: steps must be >= 2, or exactly 1 for a single point");
  }
  auto builder = family == "sigma" ? family_sigma : (family == "omega" ? family_omega : family_tau);
  std::vector<double> grid(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    grid[static_cast<size_t>(i)] =
        steps == 1 ? p0 : p0 + (p1 - p0) * static_cast<double>(i) / (steps - 1);
  }

  // grid points are independent; evaluate them on a capped worker pool and
  // write rows in grid order afterwards
  std::vector<SweepRecord> rows(grid.size());
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const unsigned workers =
      std::min<unsigned>(sweep_thread_cap(), static_cast<unsigned>(grid.size()));
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      try {
        const BipartiteOperator rho = builder(grid[i]);
        SweepRecord rec;
        rec.family = family;
        rec.p = grid[i];
        rec.e_kappa = e_kappa_primal(rho, opts).value_bits;
        rec.e_n = log_negativity(rho);
        rec.log2_z = z_bound(rho);
        rec.gap = rec.e_kappa - rec.e_n;
        rows[i] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(grid.size());
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::string csv = sweep_csv_header() + "\n";
  for (const SweepRecord& r : rows) csv += to_csv_row(r) + "\n";
  write_file_atomic(out_path, csv);
  std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
  return kExitOk;
}

int run_oneshot(const std::string& ref, const SdpOptions& opts) {
  const BipartiteOperator rho = resolve_state(ref);
  const PreparationCertificate cert = one_shot_exact_cost(rho, opts);
  std::cout << "m = " << cert.m << '\n'
            << "log2_m = " << format_g9(std::log2(static_cast<double>(cert.m))) << '\n'
            << "e_kappa = " << format_g9(cert.e_kappa) << '\n'
            << "sandwich_lower = " << format_bound(cert.sandwich_lower) << '\n'
            << "sandwich_upper = " << format_g9(cert.sandwich_upper) << '\n'
            << "prep_residual = " << format_g9(cert.prep_residual) << '\n'
            << "cp_lambda_min = " << format_g9(cert.cp_lambda_min) << '\n'
            << "pptp_lambda_min = " << format_g9(cert.pptp_lambda_min) << '\n'
            << "g_trace_error = " << format_g9(cert.g_trace_error) << '\n'
            << "g_lambda_min = " << format_g9(cert.g_lambda_min) << '\n'
            << "g_ppt_lambda_min = " << format_g9(cert.g_ppt_lambda_min) << '\n'
            << "cond_upper_lambda_min = " << format_g9(cert.cond_upper_lambda_min) << '\n'
            << "cond_lower_lambda_min = " << format_g9(cert.cond_lower_lambda_min) << '\n'
            << "certificate = " << (cert.valid() ? "valid" : "INVALID") << '\n';
  return cert.valid() ? kExitOk : kExitIntegrity;
}

int run_check(const std::string& suite, const SdpOptions& opts, std::uint64_t seed) {
  const std::vector<CheckResult> results = run_suite(suite, opts, seed);
  int failures = 0;
  for (const CheckResult& r : results) {
    if (!r.pass) ++failures;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  margin "
              << format_g9(r.margin) << "  " << r.detail << '\n';
  }
  std::cout << results.size() - static_cast<size_t>(failures) << "/" << results.size()
            << " assertions passed" << '\n';
  return failures == 0 ? kExitOk : kExitIntegrity;
}

int run_witness(const std::string& ref, const std::optional<std::string>& out_path,
                const SdpOptions& opts) {
  const BipartiteOperator rho = resolve_state(ref);
  const WitnessResult w = extract_witness(rho, opts);
  const CMat witness = w.z.mat + CMat::Identity(rho.dim(), rho.dim());
  const nlohmann::json j = state_to_json(make_bipartite(witness, rho.dim_a, rho.dim_b));
  std::cout << "violation = " << format_g9(w.violation) << '\n'
            << "e_kappa_dual = " << format_g9(w.e_kappa_dual) << '\n';
  if (out_path) {
    write_file_atomic(*out_path, j.dump(2) + "\n");
    std::cout << "wrote witness matrix to " << *out_path << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kappa-entanglement toolkit: exact PPT preparation cost via SDP"};
  app.require_subcommand(1);

  SdpOptions opts;
  std::uint64_t seed = kDefaultCheckSeed;
  app.add_option("--gap-tol", opts.gap_tol, "solver duality-gap tolerance")
      ->capture_default_str();
  app.add_option("--feas-tol", opts.feas_tol, "solver feasibility tolerance")
      ->capture_default_str();
  app.add_option("--seed", seed, "base seed for randomized batteries")
      ->capture_default_str();

  std::string ref, family, out_path, suite;
  double p0 = 0.0, p1 = 1.0;
  int steps = 11;
  bool as_json = false;
  std::optional<std::string> witness_out;

  CLI::App* measure = app.add_subcommand("measure", "compute all measures for one state");
  measure->add_option("ref", ref, "state reference (built-in name or JSON file)")->required();
  measure->add_flag("--json", as_json, "emit the report as JSON");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep a named family and write CSV");
  sweep->add_option("family", family, "sigma | omega | tau")->required();
  sweep->add_option("p_start", p0, "first parameter value")->required();
  sweep->add_option("p_end", p1, "last parameter value")->required();
  sweep->add_option("steps", steps, "number of grid points")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();

  CLI::App* oneshot = app.add_subcommand("oneshot", "certify the exact one-shot cost");
  oneshot->add_option("ref", ref, "state reference")->required();

  CLI::App* check = app.add_subcommand("check", "run a property battery");
  check->add_option("suite", suite,
                    "duality | additivity | faithfulness | monotonicity | convexity | "
                    "monogamy | twoqubit | sandwich | all")
      ->required();

  CLI::App* witness = app.add_subcommand("witness", "extract an entanglement witness");
  witness->add_option("ref", ref, "state reference")->required();
  std::string witness_path;
  CLI::Option* wopt = witness->add_option("--out", witness_path, "write witness matrix here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*measure) return run_measure(ref, as_json, opts);
    if (*sweep) return run_sweep(family, p0, p1, steps, out_path, opts);
    if (*oneshot) return run_oneshot(ref, opts);
    if (*check) return run_check(suite, opts, seed);
    if (*witness) {
      if (*wopt) witness_out = witness_path;
      return run_witness(ref, witness_out, opts);
    }
  } catch (const IntegrityFailure& e) {
    std::cerr << "integrity failure: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitValidation;
}
