#pragma once

// Command-line front end. Exit codes: 0 verified, 1 a numerical check failed
// (or a required full-rank condition does not hold), 2 invalid input.

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "causalview/nosignal.hpp"
#include "causalview/randgen.hpp"
#include "causalview/scenario_file.hpp"

namespace causalview::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2 };

struct GlobalOptions {
  bool machine = false;
  ValidationOptions validation;
};

namespace detail {

inline std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

inline json table_json(const JointDistribution& d) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.table().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < d.table().cols(); ++j) row.push_back(d(i, j));
    rows.push_back(std::move(row));
  }
  return {{"row_labels", d.row_labels()}, {"col_labels", d.col_labels()}, {"table", std::move(rows)}};
}

inline json table_json(const JointDistribution3& d) {
  return {{"labels_a", d.labels(0)}, {"labels_b", d.labels(1)}, {"labels_c", d.labels(2)}, {"values", d.values()}};
}

inline void print_table(std::ostream& out, const std::string& title, const JointDistribution& d) {
  std::size_t width = 12;
  for (const auto& l : d.row_labels()) width = std::max(width, l.size() + 2);
  for (const auto& l : d.col_labels()) width = std::max(width, l.size() + 2);
  const int w = static_cast<int>(width);
  out << title << '\n' << std::left << std::setw(w) << "";
  for (const auto& l : d.col_labels()) out << std::setw(w) << l;
  out << "| P(A)\n";
  const RealVector rows = d.row_marginal();
  for (Eigen::Index i = 0; i < d.table().rows(); ++i) {
    out << std::setw(w) << d.row_labels()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d.table().cols(); ++j) out << std::setw(w) << fmt(d(i, j));
    out << "| " << fmt(rows(i)) << '\n';
  }
  out << std::setw(w) << "P(B)";
  const RealVector cols = d.col_marginal();
  for (Eigen::Index j = 0; j < cols.size(); ++j) out << std::setw(w) << fmt(cols(j));
  out << "| total " << fmt(d.total()) << '\n' << std::right;
}

inline void print_table(std::ostream& out, const std::string& title, const JointDistribution3& d) {
  out << title << '\n';
  std::size_t w = 8;
  for (std::size_t p = 0; p < 3; ++p)
    for (const auto& l : d.labels(p)) w = std::max(w, l.size() + 2);
  const int iw = static_cast<int>(w);
  out << std::left << std::setw(iw) << "a" << std::setw(iw) << "b" << std::setw(iw) << "c" << "p\n";
  for (std::size_t i = 0; i < d.size(0); ++i)
    for (std::size_t j = 0; j < d.size(1); ++j)
      for (std::size_t k = 0; k < d.size(2); ++k) {
        out << std::setw(iw) << d.labels(0)[i] << std::setw(iw) << d.labels(1)[j] << std::setw(iw)
            << d.labels(2)[k] << fmt(d(i, j, k)) << '\n';
      }
  out << std::right;
}

inline void emit(std::ostream& out, const json& report) { out << report.dump() << '\n'; }

}  // namespace detail

/// Prints the joint distribution(s) of a scenario file. `view` is causal,
/// spacelike or both; files of either kind are converted as needed.
inline int cmd_table(const std::string& file, const std::string& view, const GlobalOptions& g,
                     std::ostream& out) {
  const ScenarioDocument doc = read_scenario_file(file, g.validation);
  const bool want_causal = view != "spacelike";
  const bool want_spacelike = view != "causal";
  const double thr = g.validation.full_rank_threshold;
  const double tol = g.validation.tol;
  json report{{"command", "table"}, {"file", file}, {"kind", kind_name(doc)}, {"view", view}};

  auto finish = [&](const auto& causal, const auto& spacelike) {
    std::optional<double> gap;
    if (causal && spacelike) gap = causal->max_abs_gap(*spacelike);
    if (g.machine) {
      if (causal) report["causal"] = detail::table_json(*causal);
      if (spacelike) report["spacelike"] = detail::table_json(*spacelike);
      if (gap) report["max_abs_gap"] = *gap;
      detail::emit(out, report);
    } else {
      if (causal) detail::print_table(out, "causal view (preparation -> channel -> measurement)", *causal);
      if (causal && spacelike) out << '\n';
      if (spacelike) detail::print_table(out, "spacelike view (shared state, two measurements)", *spacelike);
      if (gap) out << "\nmax |p_causal - p_spacelike| = " << detail::fmt(*gap, 3) << '\n';
    }
    return kOk;
  };

  if (const auto* s = std::get_if<CausalScenario>(&doc)) {
    std::optional<JointDistribution> c, sp;
    if (want_causal) c = joint_causal(*s);
    if (want_spacelike) sp = joint_spacelike(to_spacelike(*s));
    return finish(c, sp);
  }
  if (const auto* s = std::get_if<SpacelikeScenario>(&doc)) {
    std::optional<JointDistribution> c, sp;
    if (want_causal) c = joint_causal(from_spacelike(*s, thr, tol));
    if (want_spacelike) sp = joint_spacelike(*s);
    return finish(c, sp);
  }
  if (const auto* s = std::get_if<TripartiteCausalScenario>(&doc)) {
    std::optional<JointDistribution3> c, sp;
    if (want_causal) c = joint_tri_causal(*s);
    if (want_spacelike) sp = joint_tri_spacelike(to_spacelike_tri(*s));
    return finish(c, sp);
  }
  const auto& s = std::get<TripartiteSpacelikeScenario>(doc);
  std::optional<JointDistribution3> c, sp;
  if (want_causal) c = joint_tri_causal(from_spacelike_tri(s, thr, tol));
  if (want_spacelike) sp = joint_tri_spacelike(s);
  return finish(c, sp);
}

/// Converts between the causal and spacelike descriptions and writes the result.
inline int cmd_convert(const std::string& file, const std::string& direction, const std::string& out_file,
                       const GlobalOptions& g, std::ostream& out) {
  const ScenarioDocument doc = read_scenario_file(file, g.validation);
  const double thr = g.validation.full_rank_threshold;
  const double tol = g.validation.tol;
  std::optional<ScenarioDocument> converted;
  if (direction == "to-spacelike") {
    if (const auto* s = std::get_if<CausalScenario>(&doc)) converted = to_spacelike(*s);
    if (const auto* s = std::get_if<TripartiteCausalScenario>(&doc)) converted = to_spacelike_tri(*s);
  } else {
    if (const auto* s = std::get_if<SpacelikeScenario>(&doc)) converted = from_spacelike(*s, thr, tol);
    if (const auto* s = std::get_if<TripartiteSpacelikeScenario>(&doc)) converted = from_spacelike_tri(*s, thr, tol);
  }
  if (!converted) {
    throw UsageError(std::string("cannot convert a ") + kind_name(doc) + " scenario " + direction);
  }
  write_scenario_file(out_file, *converted);
  if (g.machine) {
    detail::emit(out, {{"command", "convert"}, {"input", file}, {"output", out_file},
                       {"from", kind_name(doc)}, {"to", kind_name(*converted)}});
  } else {
    out << "wrote " << kind_name(*converted) << " scenario to " << out_file << '\n';
  }
  return kOk;
}

struct VerifyResult {
  double equivalence_gap = 0.0;
  double oracle_gap = 0.0;
};

inline VerifyResult verify_scenario(const CausalScenario& s) {
  const EquivalenceReport eq = equivalence_report(s);
  return {eq.max_abs_gap, eq.causal.max_abs_gap(joint_causal_oracle(s))};
}

inline VerifyResult verify_scenario(const TripartiteCausalScenario& s) {
  const TripartiteEquivalenceReport eq = equivalence_report_tri(s);
  return {eq.max_abs_gap, eq.causal.max_abs_gap(joint_tri_causal_oracle(s))};
}

/// Checks that both views (and the independent oracle) agree for a causal file.
inline int cmd_verify(const std::string& file, double gap_tol, const GlobalOptions& g, std::ostream& out) {
  const ScenarioDocument doc = read_scenario_file(file, g.validation);
  VerifyResult r;
  if (const auto* s = std::get_if<CausalScenario>(&doc)) {
    r = verify_scenario(*s);
  } else if (const auto* s = std::get_if<TripartiteCausalScenario>(&doc)) {
    r = verify_scenario(*s);
  } else {
    throw UsageError(std::string("verify needs a causal or tripartite_causal file, got ") + kind_name(doc));
  }
  const bool pass = r.equivalence_gap < gap_tol && r.oracle_gap < gap_tol;
  if (g.machine) {
    detail::emit(out, {{"command", "verify"}, {"file", file}, {"kind", kind_name(doc)},
                       {"equivalence_gap", r.equivalence_gap}, {"oracle_gap", r.oracle_gap},
                       {"tol", gap_tol}, {"pass", pass}});
  } else {
    out << "observer equivalence gap: " << detail::fmt(r.equivalence_gap, 3) << '\n'
        << "oracle cross-check gap:   " << detail::fmt(r.oracle_gap, 3) << '\n'
        << (pass ? "PASS" : "FAIL") << " (tolerance " << detail::fmt(gap_tol, 3) << ")\n";
  }
  return pass ? kOk : kCheckFailed;
}

/// No-signalling report for a spacelike file over its declared POVMs plus
/// `extra` random alternatives per side.
inline int cmd_nosignal(const std::string& file, int extra, std::uint64_t seed, double tol, const GlobalOptions& g,
                        std::ostream& out) {
  if (extra < 0) throw UsageError("--extra-povms must be nonnegative");
  const ScenarioDocument doc = read_scenario_file(file, g.validation);
  const auto* s = std::get_if<SpacelikeScenario>(&doc);
  if (!s) throw UsageError(std::string("nosignal needs a spacelike file, got ") + kind_name(doc));
  std::vector<Povm> povms_a{s->povm_a_prime()};
  std::vector<Povm> povms_b{s->povm_b_prime()};
  for (int k = 0; k < extra; ++k) {
    Rng rng_a(RngSpec{seed, 2 * static_cast<std::uint64_t>(k)});
    povms_a.push_back(random_povm(s->shape().dim_a(), static_cast<std::size_t>(rng_a.uniform_int(2, 5)), rng_a));
    Rng rng_b(RngSpec{seed, 2 * static_cast<std::uint64_t>(k) + 1});
    povms_b.push_back(random_povm(s->shape().dim_b(), static_cast<std::size_t>(rng_b.uniform_int(2, 5)), rng_b));
  }
  const NoSignallingReport r = check_nosignalling(s->tau(), s->shape(), povms_a, povms_b, tol);
  if (g.machine) {
    detail::emit(out, {{"command", "nosignal"}, {"file", file}, {"direction_a_to_b", r.direction_a_to_b},
                       {"direction_b_to_a", r.direction_b_to_a}, {"povm_pairs_tested", r.povm_pairs_tested},
                       {"tol", r.tol}, {"pass", r.pass}});
  } else {
    out << "POVMs per side: " << povms_a.size() << " on A, " << povms_b.size() << " on B ("
        << r.povm_pairs_tested << " pairs)\n"
        << "max B-marginal change when A switches POVM: " << detail::fmt(r.direction_a_to_b, 3) << '\n'
        << "max A-marginal change when B switches POVM: " << detail::fmt(r.direction_b_to_a, 3) << '\n'
        << (r.pass ? "PASS" : "FAIL") << " (tolerance " << detail::fmt(r.tol, 3) << ")\n";
  }
  return r.pass ? kOk : kCheckFailed;
}

/// Polarizer experiment computed by both observers next to the closed form
/// p * sin^2(beta - alpha) for (a_r, b_t).
inline int cmd_demo_polarizer(double alpha, double beta, double p, double tol, const GlobalOptions& g,
                              std::ostream& out) {
  const CausalScenario s = polarizer_scenario(alpha, beta, p);
  const EquivalenceReport eq = equivalence_report(s);
  const double reference = p * std::pow(std::sin(beta - alpha), 2);
  const double causal_rt = eq.causal(0, 1);
  const double spacelike_rt = eq.spacelike(0, 1);
  const double ref_gap = std::max(std::abs(causal_rt - reference), std::abs(spacelike_rt - reference));
  const bool pass = eq.max_abs_gap < tol && ref_gap < tol;
  if (g.machine) {
    detail::emit(out, {{"command", "demo polarizer"}, {"alpha", alpha}, {"beta", beta}, {"p", p},
                       {"causal", detail::table_json(eq.causal)}, {"spacelike", detail::table_json(eq.spacelike)},
                       {"reference_a_r_b_t", reference}, {"max_abs_gap", eq.max_abs_gap},
                       {"reference_gap", ref_gap}, {"tol", tol}, {"pass", pass}});
  } else {
    out << "polarizers: alpha = " << detail::fmt(alpha) << " rad, beta = " << detail::fmt(beta)
        << " rad, p = " << detail::fmt(p) << "\n\n";
    detail::print_table(out, "observer 1: P_A prepares, the mirror carries the photon to P_B", eq.causal);
    out << '\n';
    detail::print_table(out, "observer 2: entangled source feeds P_A and P_B", eq.spacelike);
    out << "\np(a_r, b_t): causal " << detail::fmt(causal_rt, 12) << ", spacelike " << detail::fmt(spacelike_rt, 12)
        << ", p*sin^2(beta-alpha) " << detail::fmt(reference, 12) << '\n'
        << "max |p_causal - p_spacelike| = " << detail::fmt(eq.max_abs_gap, 3) << '\n'
        << (pass ? "PASS" : "FAIL") << " (tolerance " << detail::fmt(tol, 3) << ")\n";
  }
  return pass ? kOk : kCheckFailed;
}

struct SuiteOptions {
  int trials = 500;
  std::vector<int> dims{2, 3, 4};
  std::uint64_t seed = 7;
  double tol = 1e-9;
  bool tripartite = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SuiteResult {
  double worst_equivalence_gap = 0.0;
  double worst_oracle_gap = 0.0;
  double worst_tau_min_eigenvalue = 0.0;  // most negative eigenvalue of any tau
  double worst_tri_equivalence_gap = 0.0;
  double worst_tri_oracle_gap = 0.0;
  int trials = 0;
  int tripartite_trials = 0;
};

/// Tripartite trials use stream ids offset by this so they never reuse a
/// bipartite trial's stream.
inline constexpr std::uint64_t kTripartiteStreamOffset = std::uint64_t{1} << 32;

/// Runs randomized trials, fanned out over threads. Every trial owns its RNG
/// stream (stream_id = trial index) and result slot, so the aggregate does not
/// depend on scheduling.
inline SuiteResult run_suite(const SuiteOptions& opt) {
  if (opt.trials < 1) throw UsageError("--trials must be positive");
  if (opt.dims.empty()) throw UsageError("--dims must list at least one dimension");
  for (int d : opt.dims)
    if (d < 2 || d > 8) throw UsageError("--dims entries must lie in [2, 8]");
  ScenarioRanges ranges;
  ranges.dims = opt.dims;
  const auto n = static_cast<std::size_t>(opt.trials);
  const std::size_t total = opt.tripartite ? 2 * n : n;
  struct Slot {
    VerifyResult r;
    double tau_min = 0.0;
  };
  std::vector<Slot> slots(total);
  std::vector<std::string> errors(total);

  auto run_one = [&](std::size_t t) {
    try {
      if (t < n) {
        const CausalScenario s = random_causal_scenario({opt.seed, t}, ranges);
        slots[t].r = verify_scenario(s);
        slots[t].tau_min = to_spacelike(s).tau().min_eigenvalue();
      } else {
        const auto s = random_tripartite_scenario({opt.seed, kTripartiteStreamOffset + (t - n)}, opt.dims, opt.dims, ranges);
        slots[t].r = verify_scenario(s);
        slots[t].tau_min = to_spacelike_tri(s).tau_abc().min_eigenvalue();
      }
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  };

  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < total; t += workers) run_one(t);
    });
  }
  for (auto& th : pool) th.join();

  for (std::size_t t = 0; t < total; ++t) {
    if (!errors[t].empty()) throw NumericalError("suite trial " + std::to_string(t) + " failed: " + errors[t]);
  }
  SuiteResult res;
  res.trials = opt.trials;
  res.tripartite_trials = opt.tripartite ? opt.trials : 0;
  for (std::size_t t = 0; t < total; ++t) {
    const Slot& s = slots[t];
    res.worst_tau_min_eigenvalue = std::min(res.worst_tau_min_eigenvalue, s.tau_min);
    if (t < n) {
      res.worst_equivalence_gap = std::max(res.worst_equivalence_gap, s.r.equivalence_gap);
      res.worst_oracle_gap = std::max(res.worst_oracle_gap, s.r.oracle_gap);
    } else {
      res.worst_tri_equivalence_gap = std::max(res.worst_tri_equivalence_gap, s.r.equivalence_gap);
      res.worst_tri_oracle_gap = std::max(res.worst_tri_oracle_gap, s.r.oracle_gap);
    }
  }
  return res;
}

inline int cmd_suite(const SuiteOptions& opt, const GlobalOptions& g, std::ostream& out) {
  const SuiteResult r = run_suite(opt);
  const double worst = std::max({r.worst_equivalence_gap, r.worst_oracle_gap, r.worst_tri_equivalence_gap,
                                 r.worst_tri_oracle_gap});
  const bool pass = worst < opt.tol;
  if (g.machine) {
    detail::emit(out, {{"command", "suite"}, {"trials", r.trials}, {"tripartite_trials", r.tripartite_trials},
                       {"seed", opt.seed}, {"dims", opt.dims}, {"worst_equivalence_gap", r.worst_equivalence_gap},
                       {"worst_oracle_gap", r.worst_oracle_gap},
                       {"worst_tri_equivalence_gap", r.worst_tri_equivalence_gap},
                       {"worst_tri_oracle_gap", r.worst_tri_oracle_gap},
                       {"worst_tau_min_eigenvalue", r.worst_tau_min_eigenvalue}, {"tol", opt.tol}, {"pass", pass}});
  } else {
    out << r.trials << " bipartite trials (seed " << opt.seed << ")\n"
        << "  worst observer equivalence gap: " << detail::fmt(r.worst_equivalence_gap, 3) << '\n'
        << "  worst oracle gap:               " << detail::fmt(r.worst_oracle_gap, 3) << '\n';
    if (opt.tripartite) {
      out << r.tripartite_trials << " tripartite trials\n"
          << "  worst observer equivalence gap: " << detail::fmt(r.worst_tri_equivalence_gap, 3) << '\n'
          << "  worst oracle gap:               " << detail::fmt(r.worst_tri_oracle_gap, 3) << '\n';
    }
    out << "most negative shared-state eigenvalue: " << detail::fmt(r.worst_tau_min_eigenvalue, 3) << '\n'
        << (pass ? "PASS" : "FAIL") << " (tolerance " << detail::fmt(opt.tol, 3) << ")\n";
  }
  return pass ? kOk : kCheckFailed;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Compare causal and spacelike descriptions of quantum experiments", "causalview"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::string format = "human";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--struct-tol", g.validation.tol, "Tolerance for Hermiticity, PSD and completeness checks")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--full-rank-threshold", g.validation.full_rank_threshold,
                 "Minimum eigenvalue for a state to count as full rank")
      ->check(CLI::NonNegativeNumber);

  std::string file, view = "both", direction, out_file;
  auto* table = app.add_subcommand("table", "Print joint probability tables");
  table->add_option("file", file, "Scenario file")->required();
  table->add_option("--view", view, "causal, spacelike or both")->check(CLI::IsMember({"causal", "spacelike", "both"}));

  auto* convert = app.add_subcommand("convert", "Convert between causal and spacelike descriptions");
  convert->add_option("file", file, "Scenario file")->required();
  convert->add_option("--direction", direction, "to-spacelike or to-causal")
      ->required()
      ->check(CLI::IsMember({"to-spacelike", "to-causal"}));
  convert->add_option("-o,--output", out_file, "Output scenario file")->required();

  double gap_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "Check that both observers predict the same distribution");
  verify->add_option("file", file, "Causal or tripartite_causal scenario file")->required();
  verify->add_option("--tol", gap_tol, "Maximum allowed gap")->check(CLI::NonNegativeNumber);

  int extra = 8;
  std::uint64_t seed = 0;
  double ns_tol = 1e-10;
  auto* nosignal = app.add_subcommand("nosignal", "Check the no-signalling condition of a shared state");
  nosignal->add_option("file", file, "Spacelike scenario file")->required();
  nosignal->add_option("--extra-povms", extra, "Random alternative POVMs per side");
  nosignal->add_option("--seed", seed, "Seed for the random POVMs");
  nosignal->add_option("--tol", ns_tol, "Maximum allowed marginal change")->check(CLI::NonNegativeNumber);

  double alpha = 0.0, beta = std::numbers::pi / 4, p = 0.5, demo_tol = 1e-12;
  auto* demo = app.add_subcommand("demo", "Worked examples");
  demo->require_subcommand(1);
  auto* polarizer = demo->add_subcommand("polarizer", "Two polarizers seen by both observers");
  polarizer->add_option("--alpha", alpha, "Angle of P_A in radians");
  polarizer->add_option("--beta", beta, "Angle of P_B in radians");
  polarizer->add_option("--p", p, "Weight of the reflected preparation, in (0, 1)");
  polarizer->add_option("--tol", demo_tol, "Maximum allowed gap")->check(CLI::NonNegativeNumber);

  SuiteOptions suite_opt;
  auto* suite = app.add_subcommand("suite", "Randomized observer-equivalence suite");
  suite->add_option("--trials", suite_opt.trials, "Number of random scenarios");
  suite->add_option("--dims", suite_opt.dims, "Subsystem dimensions to draw from")->delimiter(',');
  suite->add_option("--seed", suite_opt.seed, "RNG seed");
  suite->add_option("--tol", suite_opt.tol, "Maximum allowed gap")->check(CLI::NonNegativeNumber);
  suite->add_flag("--tripartite", suite_opt.tripartite, "Also run as many tripartite scenarios");
  suite->add_option("--threads", suite_opt.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }
  g.machine = format == "machine";

  try {
    if (*table) return cmd_table(file, view, g, out);
    if (*convert) return cmd_convert(file, direction, out_file, g, out);
    if (*verify) return cmd_verify(file, gap_tol, g, out);
    if (*nosignal) return cmd_nosignal(file, extra, seed, ns_tol, g, out);
    if (*polarizer) return cmd_demo_polarizer(alpha, beta, p, demo_tol, g, out);
    if (*suite) return cmd_suite(suite_opt, g, out);
  } catch (const RankDeficientError& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const FormatError& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {  // ShapeError, UsageError
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace causalview::cli
