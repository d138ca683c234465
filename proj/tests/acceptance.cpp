// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "causalview/causalview.hpp"
#include "causalview/cli.hpp"

using namespace causalview;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixture(const std::string& name) { return std::string(CAUSALVIEW_FIXTURE_DIR) + "/" + name; }

const std::vector<CausalScenario>& bipartite_set() {
  static const std::vector<CausalScenario> set = [] {
    std::vector<CausalScenario> v;
    v.reserve(500);
    for (std::uint64_t t = 0; t < 500; ++t) v.push_back(random_causal_scenario({7, t}));
    return v;
  }();
  return set;
}

Outcome polarizer_grid() {
  const auto t0 = Clock::now();
  double gap = 0.0, ref = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double alpha = i * std::numbers::pi / 12, beta = j * std::numbers::pi / 12;
      const EquivalenceReport r = equivalence_report(polarizer_scenario(alpha, beta, 0.5));
      gap = std::max(gap, r.max_abs_gap);
      const double s = std::sin(beta - alpha);
      ref = std::max({ref, std::abs(r.causal(0, 1) - 0.5 * s * s), std::abs(r.spacelike(0, 1) - 0.5 * s * s)});
    }
  const double secs = seconds_since(t0);
  return {gap < 1e-12 && ref < 1e-12 && secs < 1.0,
          "view gap " + sci(gap) + ", sin^2 reference gap " + sci(ref) + ", " + sci(secs) + " s"};
}

Outcome bipartite_equivalence() {
  const auto t0 = Clock::now();
  double gap = 0.0;
  for (std::uint64_t t = 0; t < 500; ++t) gap = std::max(gap, equivalence_report(random_causal_scenario({7, t})).max_abs_gap);
  const double secs = seconds_since(t0);
  return {gap < 1e-9 && secs < 30.0, "500 scenarios, max gap " + sci(gap) + ", " + sci(secs) + " s"};
}

Outcome oracle_agreement() {
  double gap = 0.0;
  for (const auto& s : bipartite_set()) gap = std::max(gap, joint_causal(s).max_abs_gap(joint_causal_oracle(s)));
  return {gap < 1e-10, "max gap " + sci(gap)};
}

Outcome tau_validity() {
  double min_eig = 0.0, trace_err = 0.0, marg_err = 0.0;
  for (const auto& s : bipartite_set()) {
    const SpacelikeScenario sp = to_spacelike(s);
    min_eig = std::min(min_eig, sp.tau().min_eigenvalue());
    trace_err = std::max(trace_err, std::abs(sp.tau().mat().trace().real() - 1.0));
    marg_err = std::max(marg_err, frob_dist(partial_trace(sp.tau().mat(), sp.shape(), Subsystem::B),
                                            s.rho().mat().transpose()));
  }
  return {min_eig >= -1e-10 && trace_err < 1e-10 && marg_err < 1e-10,
          "min eigenvalue " + sci(min_eig) + ", trace error " + sci(trace_err) + ", marginal error " + sci(marg_err)};
}

Outcome choi_round_trips() {
  double choi_gap = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    Rng rng({5, t});
    const Eigen::Index d_in = 2 + static_cast<Eigen::Index>(rng.uniform_int(0, 2));
    const Eigen::Index d_out = 2 + static_cast<Eigen::Index>(rng.uniform_int(0, 2));
    const std::size_t n = static_cast<std::size_t>(std::max<Eigen::Index>(rng.uniform_int(1, 4), (d_in + d_out - 1) / d_out));
    const ComplexMatrix c = choi(random_cptp(d_in, d_out, n, rng));
    choi_gap = std::max(choi_gap, frob_dist(choi(kraus_from_choi(c, d_in, d_out)), c));
  }
  double dist_gap = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const CausalScenario s = random_causal_scenario({55, t});
    dist_gap = std::max(dist_gap, joint_causal(from_spacelike(to_spacelike(s))).max_abs_gap(joint_causal(s)));
  }
  return {choi_gap < 1e-10 && dist_gap < 1e-9, "Choi gap " + sci(choi_gap) + ", distribution gap " + sci(dist_gap)};
}

Outcome tripartite_equivalence() {
  const auto t0 = Clock::now();
  double gap = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t)
    gap = std::max(gap, equivalence_report_tri(random_tripartite_scenario({9, t}, {2}, {2})).max_abs_gap);
  for (std::uint64_t t = 0; t < 20; ++t)
    gap = std::max(gap, equivalence_report_tri(random_tripartite_scenario({10, t}, {3}, {2})).max_abs_gap);
  const double secs = seconds_since(t0);
  return {gap < 1e-9 && secs < 30.0, "120 scenarios, max gap " + sci(gap) + ", " + sci(secs) + " s"};
}

Outcome no_signalling() {
  double worst = 0.0;
  bool all_pass = true;
  std::uint64_t k = 0;
  for (const auto& s : bipartite_set()) {
    const SpacelikeScenario sp = to_spacelike(s);
    Rng rng({11, k++});
    std::vector<Povm> pa, pb;
    for (int i = 0; i < 8; ++i) {
      pa.push_back(random_povm(sp.shape().dim_a(), static_cast<std::size_t>(rng.uniform_int(2, 5)), rng));
      pb.push_back(random_povm(sp.shape().dim_b(), static_cast<std::size_t>(rng.uniform_int(2, 5)), rng));
    }
    const NoSignallingReport r = check_nosignalling(sp.tau(), sp.shape(), pa, pb, 1e-10);
    all_pass = all_pass && r.pass;
    worst = std::max({worst, r.direction_a_to_b, r.direction_b_to_a});
  }
  return {all_pass, "500 states x 8 POVMs per side, worst marginal spread " + sci(worst)};
}

Outcome signalling_demo_check() {
  ComplexMatrix r0 = ComplexMatrix::Zero(2, 2), r1 = ComplexMatrix::Zero(2, 2);
  r0(0, 0) = 0.9;
  r0(1, 1) = 0.1;
  r1(0, 0) = 0.1;
  r1(1, 1) = 0.9;
  const ComplexMatrix p0 = basis_vector(2, 0) * basis_vector(2, 0).adjoint();
  const ComplexMatrix p1 = basis_vector(2, 1) * basis_vector(2, 1).adjoint();
  const Povm z({"0", "1"}, {p0, p1});
  const CausalScenario s(DensityMatrix(r0), KrausChannel::identity_channel(2), z, z);
  const SignallingDemoReport r = signalling_demo(s, DensityMatrix(r1));
  const double shift_err = std::max(std::abs(r.causal_b_marginal(0) - 0.9), std::abs(r.causal_b_marginal_prime(0) - 0.1));
  const double spacelike_err =
      std::max((r.causal_b_marginal - r.spacelike_b_marginal).cwiseAbs().maxCoeff(),
               (r.causal_b_marginal_prime - r.spacelike_b_marginal_prime).cwiseAbs().maxCoeff());
  const bool pass = shift_err < 1e-12 && r.cross_view_gap < 1e-10 && spacelike_err < 1e-10 && !r.degenerate;
  return {pass, "B marginal " + sci(r.causal_b_marginal(0)) + " -> " + sci(r.causal_b_marginal_prime(0)) +
                    ", cross-view gap " + sci(std::max(r.cross_view_gap, spacelike_err))};
}

Outcome ensemble_completeness() {
  double gap = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng({13, t});
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform_int(0, 2));
    const DensityMatrix rho = random_density(d, rng);
    const Povm povm = random_povm(d, static_cast<std::size_t>(rng.uniform_int(2, 5)), rng);
    const ComplexMatrix sq = sqrtm_psd(rho.mat());
    ComplexMatrix direct = ComplexMatrix::Zero(d, d);
    for (const auto& a : povm.effects()) direct += sq * a * sq;
    gap = std::max({gap, frob_dist(direct, rho.mat()), frob_dist(ensemble_decompose(rho, povm).mixture(), rho.mat())});
  }
  return {gap < 1e-12, "200 pairs, max gap " + sci(gap)};
}

int cli_code(std::vector<std::string> args) {
  args.insert(args.begin(), "causalview");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome cli_contract() {
  const auto tmp = std::filesystem::temp_directory_path();
  double rt_gap = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const CausalScenario s = random_causal_scenario({17, t});
    const std::string path = (tmp / "causalview_acceptance_rt.json").string();
    write_scenario_file(path, s);
    rt_gap = std::max(rt_gap, joint_causal(std::get<CausalScenario>(read_scenario_file(path))).max_abs_gap(joint_causal(s)));
    const SpacelikeScenario sp = to_spacelike(s);
    write_scenario_file(path, sp);
    rt_gap = std::max(rt_gap,
                      joint_spacelike(std::get<SpacelikeScenario>(read_scenario_file(path))).max_abs_gap(joint_spacelike(sp)));
    std::filesystem::remove(path);
  }

  const std::string sink = (tmp / "causalview_acceptance_out.json").string();
  struct Case {
    std::vector<std::string> args;
    int expected;
  };
  const std::vector<Case> cases = {
      {{"verify", fixture("bell_causal.json")}, 0},
      {{"verify", fixture("polarizer_causal.json")}, 0},
      {{"verify", fixture("tripartite_depolarizing_causal.json")}, 0},
      {{"table", fixture("bell_spacelike.json"), "--view", "both"}, 0},
      {{"nosignal", fixture("product_spacelike.json")}, 0},
      {{"convert", fixture("bell_causal.json"), "--direction", "to-spacelike", "-o", sink}, 0},
      {{"convert", fixture("pure_marginal_spacelike.json"), "--direction", "to-causal", "-o", sink}, 1},
      {{"table", fixture("pure_marginal_spacelike.json"), "--view", "causal"}, 1},
      {{"verify", fixture("noncptp_causal.json")}, 2},
      {{"table", fixture("bad_povm_causal.json")}, 2},
      {{"table", fixture("malformed.json")}, 2},
      {{"demo", "polarizer", "--p", "1"}, 2},
  };
  int mismatches = 0;
  std::string first_bad;
  for (const auto& c : cases) {
    const int got = cli_code(c.args);
    if (got != c.expected) {
      if (mismatches++ == 0) first_bad = c.args[0] + " " + c.args[1] + " -> " + std::to_string(got);
    }
  }
  std::filesystem::remove(sink);
  std::string detail = "round-trip gap " + sci(rt_gap) + ", exit codes " + std::to_string(cases.size() - mismatches) +
                       "/" + std::to_string(cases.size()) + " as expected";
  if (mismatches) detail += " (first mismatch: " + first_bad + ")";
  return {rt_gap < 1e-12 && mismatches == 0, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"polarizer tables agree on 7x7 grid", polarizer_grid},
      {"bipartite observer equivalence", bipartite_equivalence},
      {"causal kernel matches oracle", oracle_agreement},
      {"spacelike state validity", tau_validity},
      {"Choi-Jamiolkowski round trips", choi_round_trips},
      {"tripartite equivalence", tripartite_equivalence},
      {"no-signalling of derived states", no_signalling},
      {"signalling demo and its reinterpretation", signalling_demo_check},
      {"ensemble completeness", ensemble_completeness},
      {"CLI file round trip and exit codes", cli_contract},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] AC%zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
