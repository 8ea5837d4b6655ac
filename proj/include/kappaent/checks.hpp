#pragma once

// Named property batteries behind the `check` command and the acceptance
// suite: strong duality, additivity, faithfulness both ways, twirl
// monotonicity, the convexity and monogamy counterexamples, the two-qubit
// collapse onto logarithmic negativity, and the sandwich ordering.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kappaent/channels.hpp"
#include "kappaent/linalg.hpp"
#include "kappaent/measures.hpp"
#include "kappaent/states.hpp"

namespace kappaent {

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // signed slack; nonnegative means pass for thresholded checks
  std::string detail;
};

struct NamedState {
  std::string name;
  BipartiteOperator state;
};

inline constexpr std::uint64_t kDefaultCheckSeed = 20240;

/// The shared test battery: every closed-form state plus seeded random states
/// of mixed shapes and ranks.
inline std::vector<NamedState> battery_states(std::uint64_t seed = kDefaultCheckSeed) {
  std::vector<NamedState> v;
  v.push_back({"phi:2", max_entangled(2)});
  v.push_back({"phi:3", max_entangled(3)});
  v.push_back({"phi:4", max_entangled(4)});
  v.push_back({"rho_v", antisym_rank2()});
  const ConvexityTrio trio = convexity_trio();
  v.push_back({"convexity:1", trio.rho1});
  v.push_back({"convexity:2", trio.rho2});
  v.push_back({"convexity:avg", trio.average});
  const MonogamyState mono = monogamy_state();
  v.push_back({"monogamy:abc", mono.psi_a_bc});
  v.push_back({"monogamy:ab", mono.psi_ab});
  v.push_back({"monogamy:ac", mono.psi_ac});
  v.push_back({"sigma:0.25", family_sigma(0.25)});
  v.push_back({"sigma:0.5", family_sigma(0.5)});
  v.push_back({"omega:0.5", family_omega(0.5)});
  v.push_back({"tau:0.5", family_tau(0.5)});
  v.push_back({"random:2x2r4", random_state(2, 2, 4, seed + 1)});
  v.push_back({"random:2x2r2", random_state(2, 2, 2, seed + 2)});
  v.push_back({"random:2x3r6", random_state(2, 3, 6, seed + 3)});
  v.push_back({"random:3x3r9", random_state(3, 3, 9, seed + 4)});
  v.push_back({"random:2x4r5", random_state(2, 4, 5, seed + 5)});
  return v;
}

namespace detail {

inline CheckResult threshold_check(std::string name, double margin, std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.margin = margin;
  r.pass = margin >= 0.0;
  r.detail = std::move(detail);
  return r;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

// Mixes rho toward the maximally mixed state just past the PPT boundary.
inline BipartiteOperator mix_to_ppt(const BipartiteOperator& rho) {
  const double lmin = lambda_min(partial_transpose(rho).mat);
  if (lmin >= 0.0) return rho;
  const double inv_d2 = 1.0 / static_cast<double>(rho.dim());
  const double lam = (-lmin) / (-lmin + inv_d2);
  const double lam_past = std::min(1.0, lam * 1.02 + 1e-9);
  CMat m = (1.0 - lam_past) * rho.mat +
           lam_past * CMat::Identity(rho.dim(), rho.dim()) / static_cast<double>(rho.dim());
  return make_bipartite(std::move(m), rho.dim_a, rho.dim_b);
}

}  // namespace detail

/// |primal - dual| <= 1e-6 across the battery (strong duality).
inline std::vector<CheckResult> check_duality(const SdpOptions& opts = SdpOptions{},
                                              std::uint64_t seed = kDefaultCheckSeed) {
  std::vector<CheckResult> out;
  for (const NamedState& s : battery_states(seed)) {
    const double primal = e_kappa_primal(s.state, opts).value_bits;
    const double dual = e_kappa_dual(s.state, opts).value_bits;
    const double diff = std::abs(primal - dual);
    out.push_back(detail::threshold_check(
        "duality/" + s.name, 1e-6 - diff,
        "primal " + detail::fmt(primal) + " dual " + detail::fmt(dual)));
  }
  return out;
}

/// Direct tensor-product solves against the additive prediction.
inline std::vector<CheckResult> check_additivity(const SdpOptions& opts = SdpOptions{}) {
  std::vector<CheckResult> out;
  const auto run = [&](const std::string& name, const BipartiteOperator& a,
                       const BipartiteOperator& b) {
    const AdditivityReport r = additivity_check(a, b, opts);
    out.push_back(detail::threshold_check(
        "additivity/" + name, 1e-5 - r.gap,
        "lhs " + detail::fmt(r.lhs) + " rhs " + detail::fmt(r.rhs)));
  };
  const ConvexityTrio trio = convexity_trio();
  run("phi2xphi2", max_entangled(2), max_entangled(2));
  run("rho_vxphi2", antisym_rank2(), max_entangled(2));
  run("phi2xppt", max_entangled(2), trio.rho2);
  return out;
}

/// Both directions of faithfulness: vanishing kappa measure on PPT states,
/// strictly positive measure and a strict witness on NPT states.
inline std::vector<CheckResult> check_faithfulness(const SdpOptions& opts = SdpOptions{},
                                                   std::uint64_t seed = kDefaultCheckSeed,
                                                   int count = 50) {
  std::vector<CheckResult> out;
  int made = 0;
  std::uint64_t s = seed;
  while (made < count) {
    ++s;
    const Index da = 2 + (made % 2);
    const Index db = da;
    const BipartiteOperator ppt =
        detail::mix_to_ppt(random_state(da, db, da * db, s));
    if (!is_psd(partial_transpose(ppt).mat, 1e-8)) continue;  // must land PPT
    const double ek = e_kappa_primal(ppt, opts).value_bits;
    out.push_back(detail::threshold_check(
        "faithfulness/ppt" + std::to_string(made), 1e-6 - ek, "e_kappa " + detail::fmt(ek)));
    ++made;
  }
  made = 0;
  s = seed + 1000;
  while (made < count) {
    ++s;
    const Index da = 2 + (made % 2);
    const Index db = da;
    const BipartiteOperator cand = random_state(da, db, 2, s);
    if (lambda_min(partial_transpose(cand).mat) > -1e-3) continue;  // want clearly NPT
    const double ek = e_kappa_primal(cand, opts).value_bits;
    const WitnessResult w = extract_witness(cand, opts);
    const double margin = std::min(ek - 1e-4, -w.violation);
    out.push_back(detail::threshold_check(
        "faithfulness/npt" + std::to_string(made), margin,
        "e_kappa " + detail::fmt(ek) + " violation " + detail::fmt(w.violation)));
    ++made;
  }
  return out;
}

/// Twirl monotonicity E_kappa(T(rho)) <= E_kappa(rho) + 1e-6 on random d x d
/// states, d in {2, 3}.
inline std::vector<CheckResult> check_monotonicity(const SdpOptions& opts = SdpOptions{},
                                                   std::uint64_t seed = kDefaultCheckSeed,
                                                   int count_per_dim = 50) {
  std::vector<CheckResult> out;
  for (Index d : {Index(2), Index(3)}) {
    for (int i = 0; i < count_per_dim; ++i) {
      const BipartiteOperator rho =
          random_state(d, d, 1 + (i % (d * d)), seed + 2000 + static_cast<std::uint64_t>(i) +
                                                    static_cast<std::uint64_t>(d) * 101);
      const double before = e_kappa_primal(rho, opts).value_bits;
      const double after = e_kappa_primal(isotropic_twirl(rho), opts).value_bits;
      out.push_back(detail::threshold_check(
          "monotonicity/d" + std::to_string(d) + "-" + std::to_string(i),
          before + 1e-6 - after,
          "before " + detail::fmt(before) + " after " + detail::fmt(after)));
    }
  }
  return out;
}

/// The convexity counterexample with its printed margin log2(3/2) - 1/2.
inline std::vector<CheckResult> check_convexity(const SdpOptions& opts = SdpOptions{}) {
  std::vector<CheckResult> out;
  const ConvexityTrio trio = convexity_trio();
  const double e1 = e_kappa_primal(trio.rho1, opts).value_bits;
  const double e2 = e_kappa_primal(trio.rho2, opts).value_bits;
  const double ea = e_kappa_primal(trio.average, opts).value_bits;
  out.push_back(detail::threshold_check("convexity/rho1", 1e-6 - std::abs(e1 - 1.0),
                                        "e_kappa " + detail::fmt(e1)));
  out.push_back(detail::threshold_check("convexity/rho2", 1e-6 - std::abs(e2),
                                        "e_kappa " + detail::fmt(e2)));
  out.push_back(detail::threshold_check("convexity/average",
                                        1e-6 - std::abs(ea - std::log2(1.5)),
                                        "e_kappa " + detail::fmt(ea)));
  const double margin = ea - 0.5 * (e1 + e2);
  out.push_back(detail::threshold_check(
      "convexity/violation", margin - (std::log2(1.5) - 0.5) + 1e-6,
      "margin " + detail::fmt(margin) + " expected " + detail::fmt(std::log2(1.5) - 0.5)));
  return out;
}

/// The monogamy counterexample with its printed margin 2 log2(3/2) - 1.
inline std::vector<CheckResult> check_monogamy(const SdpOptions& opts = SdpOptions{}) {
  std::vector<CheckResult> out;
  const MonogamyState mono = monogamy_state();
  const double whole = e_kappa_primal(mono.psi_a_bc, opts).value_bits;
  const double ab = e_kappa_primal(mono.psi_ab, opts).value_bits;
  const double ac = e_kappa_primal(mono.psi_ac, opts).value_bits;
  out.push_back(detail::threshold_check("monogamy/whole", 1e-6 - std::abs(whole - 1.0),
                                        "e_kappa " + detail::fmt(whole)));
  out.push_back(detail::threshold_check("monogamy/ab",
                                        1e-6 - std::abs(ab - std::log2(1.5)),
                                        "e_kappa " + detail::fmt(ab)));
  out.push_back(detail::threshold_check("monogamy/ac",
                                        1e-6 - std::abs(ac - std::log2(1.5)),
                                        "e_kappa " + detail::fmt(ac)));
  const double margin = ab + ac - whole;
  out.push_back(detail::threshold_check(
      "monogamy/violation", margin - (2.0 * std::log2(1.5) - 1.0) + 1e-6,
      "margin " + detail::fmt(margin) + " expected " + detail::fmt(2.0 * std::log2(1.5) - 1.0)));
  return out;
}

/// E_kappa = E_N within 1e-6 on seeded random two-qubit states.
inline std::vector<CheckResult> check_twoqubit(const SdpOptions& opts = SdpOptions{},
                                               std::uint64_t seed = kDefaultCheckSeed,
                                               int count = 100) {
  std::vector<CheckResult> out;
  for (int i = 0; i < count; ++i) {
    const BipartiteOperator rho =
        random_state(2, 2, 1 + (i % 4), seed + 3000 + static_cast<std::uint64_t>(i));
    const double ek = e_kappa_primal(rho, opts).value_bits;
    const double en = log_negativity(rho);
    out.push_back(detail::threshold_check("twoqubit/" + std::to_string(i),
                                          1e-6 - std::abs(ek - en),
                                          "e_kappa " + detail::fmt(ek) + " e_n " +
                                              detail::fmt(en)));
  }
  return out;
}

/// Ordering E_N <= E_kappa <= log2 Z across the battery, with the
/// binegativity collapse checked whenever the condition holds.
inline std::vector<CheckResult> check_sandwich(const SdpOptions& opts = SdpOptions{},
                                               std::uint64_t seed = kDefaultCheckSeed) {
  std::vector<CheckResult> out;
  for (const NamedState& s : battery_states(seed)) {
    const double ek = e_kappa_primal(s.state, opts).value_bits;
    const double en = log_negativity(s.state);
    const double lz = z_bound(s.state);
    const double margin = std::min(ek - en + 1e-6, lz - ek + 1e-6);
    out.push_back(detail::threshold_check(
        "sandwich/" + s.name, margin,
        "e_n " + detail::fmt(en) + " e_kappa " + detail::fmt(ek) + " log2_z " +
            detail::fmt(lz)));
    if (binegativity_holds(s.state)) {
      out.push_back(detail::threshold_check("sandwich/binegativity-collapse/" + s.name,
                                            1e-6 - std::abs(ek - en),
                                            "e_kappa " + detail::fmt(ek) + " e_n " +
                                                detail::fmt(en)));
    }
  }
  return out;
}

/// Runs one named suite; "all" concatenates every battery.
inline std::vector<CheckResult> run_suite(const std::string& name,
                                          const SdpOptions& opts = SdpOptions{},
                                          std::uint64_t seed = kDefaultCheckSeed) {
  if (name == "duality") return check_duality(opts, seed);
  if (name == "additivity") return check_additivity(opts);
  if (name == "faithfulness") return check_faithfulness(opts, seed);
  if (name == "monotonicity") return check_monotonicity(opts, seed);
  if (name == "convexity") return check_convexity(opts);
  if (name == "monogamy") return check_monogamy(opts);
  if (name == "twoqubit") return check_twoqubit(opts, seed);
  if (name == "sandwich") return check_sandwich(opts, seed);
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const char* suite : {"duality", "additivity", "faithfulness", "monotonicity",
                              "convexity", "monogamy", "twoqubit", "sandwich"}) {
      std::vector<CheckResult> part = run_suite(suite, opts, seed);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown check suite: " + name);
}

}  // namespace kappaent
