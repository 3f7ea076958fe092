// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and sample sizes are fixed here.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mbqkd/cli.hpp"
#include "mbqkd/mbqkd.hpp"

using namespace mbqkd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("violated: " + what);
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EncoderAction action_for(MixedBasisSymbol s) {
  return s == MixedBasisSymbol::Chi1   ? EncoderAction::Identity
         : s == MixedBasisSymbol::Chi2 ? EncoderAction::HalfWavePlate0
                                       : EncoderAction::MeasureAndReplace;
}

std::vector<RoundRecord> session(std::uint64_t n, double x, std::uint64_t seed, std::optional<BasisPair> fixed = {}) {
  SessionConfig c;
  c.n_rounds = n;
  c.eve_presence = x;
  c.seed = seed;
  c.fixed_bases = fixed;
  return run_session(c);
}

// 1. Every basis state is identified on every trial.
Outcome discriminator_determinism() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(1);
  int wrong = 0;
  for (auto s : kAllSymbols)
    for (int t = 0; t < 10000; ++t) wrong += discriminate(mixed_basis_state(s), rng).symbol != s;
  const double secs = seconds_since(t0);
  o.require(wrong == 0, "0 misclassifications");
  o.require(secs < 1.0, "runtime < 1 s");
  o.note("misclassified " + std::to_string(wrong) + "/40000 in " + fmt("%.3f", secs) + " s");
  return o;
}

// 2. Eve's readings when Alice's scrambler is in.
Outcome eve_reading_probabilities() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto bob_pair = mixed_basis_state(MixedBasisSymbol::Chi1);
  struct Case {
    MixedBasisSymbol sent;
    std::array<double, 4> want;
    std::array<bool, 4> checked;
  };
  const std::array<Case, 2> cases = {{
      {MixedBasisSymbol::Chi1, {0.0, 0.5, 0.25, 0.25}, {true, true, true, true}},
      {MixedBasisSymbol::Chi3, {0.25, 0.25, 0.5, 0.0}, {true, true, false, false}},
  }};
  RandomStream rng(2);
  double worst = 0.0;
  for (const auto& c : cases) {
    std::array<double, 4> f{};
    int n = 0;
    while (n < 100000) {
      const auto r = eve_intercept_round({bob_pair, action_for(c.sent), BasisChoice::Hadamard}, rng);
      if (r.alice_realized != c.sent) continue;
      ++n;
      f[index_of(r.read_symbol)] += 1.0;
    }
    std::string row;
    for (std::size_t k = 0; k < 4; ++k) {
      f[k] /= n;
      row += (k ? "," : "") + fmt("%.4f", f[k]);
      if (c.checked[k]) worst = std::max(worst, std::abs(f[k] - c.want[k]));
    }
    o.note(std::string(to_string(c.sent)) + " -> (" + row + ")");
  }
  o.require(worst <= 0.01, "within +-0.01");
  o.require(seconds_since(t0) < 10.0, "runtime < 10 s");
  o.note("max deviation " + fmt("%.4f", worst));
  return o;
}

// 3. Monte-Carlo tables against the closed forms, every nonzero entry.
Outcome table_reproduction() {
  Outcome o;
  for (int which : {1, 2}) {
    const auto config = which == 1 ? BasisConfig::NoHWP : BasisConfig::BothHWP;
    const std::uint64_t rounds = which == 1 ? 100000 : 400000;
    const double tol = which == 1 ? 0.01 : 0.005;
    double worst = 0.0;
    for (double x : {0.25, 0.5, 1.0}) {
      const auto t = session(rounds, x, 300 + which * 10 + static_cast<std::uint64_t>(x * 4), bases_of(config));
      const auto est = estimate_joint_from_transcript(t, config, x);
      const auto closed = joint_distribution_closed_form(x, config);
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < kEveSlots; ++k)
          for (std::size_t m = 0; m < 4; ++m) {
            if (closed.at(j, k, m) == 0.0) {
              o.require(est.distribution.at(j, k, m) == 0.0, "structural zeros stay zero");
              continue;
            }
            worst = std::max(worst, std::abs(est.distribution.at(j, k, m) - closed.at(j, k, m)));
          }
    }
    o.require(worst <= tol, "table " + std::to_string(which) + " within " + fmt("%g", tol));
    o.note("table " + std::to_string(which) + " max deviation " + fmt("%.5f", worst) + " (tol " + fmt("%g", tol) + ")");
  }
  return o;
}

// 4. Anchors of the information curves.
Outcome information_anchors() {
  Outcome o;
  const double iab1 = iab_closed_form(1.0);
  o.require(std::abs(iab1 - 0.7736) <= 1e-4, "I_AB(1) = 0.7736 +- 1e-4");
  o.require(iae_closed_form(1.0) == 0.875, "I_AE(1) = 0.875");
  o.require(std::abs(iab_closed_form(0.0) - 2.0) <= 1e-15, "I_AB(0) = 2");
  o.require(iae_closed_form(0.0) == 0.0, "I_AE(0) = 0");
  o.note("I_AB(1) = " + fmt("%.10f", iab1) + ", I_AE(1) = " + fmt("%.10g", iae_closed_form(1.0)) +
         ", I_AB(0) = " + fmt("%.10g", iab_closed_form(0.0)) + ", I_AE(0) = " + fmt("%.10g", iae_closed_form(0.0)));
  return o;
}

// 5. Security threshold.
Outcome crossover_point() {
  Outcome o;
  const double x = crossover();
  o.require(x >= 0.6045 && x <= 0.6055, "x* in [0.6045, 0.6055]");
  o.require(std::abs(disturbance(x) - 0.302) <= 0.001, "D = x*/2 = 0.302");
  o.note("x* = " + fmt("%.10f", x) + ", D = " + fmt("%.6f", disturbance(x)));
  return o;
}

// 6. Information computed from the tables equals the closed forms; Monte Carlo agrees.
Outcome tables_to_information() {
  Outcome o;
  double worst_ab = 0.0, worst_ae = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    const auto t = mi_from_tables(x);
    worst_ab = std::max(worst_ab, std::abs(t.i_ab - iab_closed_form(x)));
    worst_ae = std::max(worst_ae, std::abs(t.i_ae - iae_closed_form(x)));
  }
  o.require(worst_ab <= 1e-9 && worst_ae <= 1e-9, "table information within 1e-9 of closed forms");
  o.note("max residual I_AB " + fmt("%.3e", worst_ab) + ", I_AE " + fmt("%.3e", worst_ae));
  const auto rep = estimate_mi_from_transcript(session(400000, 1.0, 6), 1.0);
  o.require(std::abs(rep.i_ab_estimate - 0.774) <= 0.02, "Monte-Carlo I_AB(1) within 0.02 of 0.774");
  o.note("Monte-Carlo I_AB(1) = " + fmt("%.4f", rep.i_ab_estimate) + " +- " + fmt("%.4f", rep.i_ab_stderr));
  return o;
}

// 7. Control-mode escape.
Outcome detection_escape() {
  Outcome o;
  const auto e = estimate_cycle_escape(1.0, 1, 10000, 7);
  o.require(std::abs(e.probability - 0.5625) <= 0.02, "cycle escape 0.5625 +- 0.02");
  o.require(std::abs(detection_escape_probability(1) - 0.5625) <= 1e-15, "closed form (3/4)^2");
  const double c = detection_escape_per_character();
  o.require(c == std::pow(0.53 / 1.54, 8), "per-character constant = (0.53/1.54)^8");
  o.require(std::abs(c - 0.0002) < 5e-6, "rounds to 0.0002");
  o.note("Monte-Carlo cycle escape " + fmt("%.4f", e.probability) + " +- " + fmt("%.4f", e.standard_error) +
         ", per-character constant " + fmt("%.6e", c));
  return o;
}

// 8. Hadamard action and post-BS structure as exact amplitudes.
Outcome physics_identities() {
  Outcome o;
  constexpr OpticalMode h1{Side::Side1, Polarization::H}, v1{Side::Side1, Polarization::V};
  constexpr OpticalMode h2{Side::Side2, Polarization::H}, v2{Side::Side2, Polarization::V};
  constexpr double tol = 1e-12;
  double worst = 0.0;
  auto cmp = [&](const TwoPhotonState& s, const Amplitudes& want) {
    for (std::size_t n = 0; n < kFockDim; ++n) worst = std::max(worst, std::abs(s[n] - want[n]));
  };
  const double r = kInvSqrt2;
  // HWP|chi1,2> = [|HH> -+ |VV> - (|HV> +- |VH>)]/2 = (Phi-/+ - chi2,1)/sqrt2
  for (int sign : {+1, -1}) {
    const auto sent = mixed_basis_state(sign > 0 ? MixedBasisSymbol::Chi1 : MixedBasisSymbol::Chi2);
    const auto other = mixed_basis_state(sign > 0 ? MixedBasisSymbol::Chi2 : MixedBasisSymbol::Chi1);
    const auto out = hadamard_on_travel(sent);
    Amplitudes bracket{};
    bracket[fock_index(h1, h2)] = 0.5;
    bracket[fock_index(v1, v2)] = -0.5 * sign;
    bracket[fock_index(h1, v2)] = -0.5;
    bracket[fock_index(v1, h2)] = -0.5 * sign;
    cmp(out, bracket);
    Amplitudes bell{};
    bell[fock_index(h1, h2)] = r;
    bell[fock_index(v1, v2)] = -r * sign;
    for (std::size_t n = 0; n < kFockDim; ++n) bell[n] = (bell[n] - other[n]) * r;
    cmp(out, bell);
  }
  // BS after HWP|chi1>: (|2_1H> - |2_1V> - |2_2H> + |2_2V>)/(2 sqrt2) - (|1H1V> - |2H2V>)/2
  const auto bs = apply_mode_unitary(hadamard_on_travel(mixed_basis_state(MixedBasisSymbol::Chi1)), beam_splitter_unitary());
  const double q = r / 2;
  Amplitudes want{};
  want[fock_index(h1, h1)] = q;
  want[fock_index(v1, v1)] = -q;
  want[fock_index(h2, h2)] = -q;
  want[fock_index(v2, v2)] = q;
  want[fock_index(h1, v1)] = -0.5;
  want[fock_index(h2, v2)] = 0.5;
  cmp(bs, want);
  const double bunched_hv = std::norm(bs.amplitude(h1, v1)) + std::norm(bs.amplitude(h2, v2));
  const double split = split_probability(bs);
  const double hh = std::norm(bs.amplitude(h1, h1)) + std::norm(bs.amplitude(h2, h2));
  const double vv = std::norm(bs.amplitude(v1, v1)) + std::norm(bs.amplitude(v2, v2));
  const std::array<double, 4> got{bunched_hv, split, hh, vv}, expect{0.5, 0.0, 0.25, 0.25};
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - expect[i]));
  o.require(worst <= tol, "amplitudes and detection distribution within 1e-12");
  o.note("(bunched H+V, split, 2H, 2V) = (" + fmt("%.12g", bunched_hv) + ", " + fmt("%.12g", split) + ", " +
         fmt("%.12g", hh) + ", " + fmt("%.12g", vv) + "); max deviation " + fmt("%.2e", worst));
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 9. Byte-identical transcripts and golden CSVs.
Outcome determinism() {
  Outcome o;
  auto simulate = [](const std::string& format) {
    std::stringstream ss;
    cli::cmd_simulate({200, 0.5, true, 20171018, format}, ss);
    return ss.str();
  };
  auto table = [](int which, double x, std::uint64_t rounds) {
    std::stringstream ss;
    cli::cmd_table({which, x, rounds, 7}, ss);
    return ss.str();
  };
  auto mi = [] {
    std::stringstream ss;
    cli::cmd_mi_curve({0.0, 1.0, 10, 0, 1}, ss);
    return ss.str();
  };
  auto detect = [] {
    std::stringstream ss;
    cli::cmd_detect({1, 1, 5000, 1.0, 11}, ss);
    return ss.str();
  };
  const std::vector<std::pair<std::string, std::function<std::string()>>> outputs = {
      {"simulate_x0.5_seed20171018.jsonl", [&] { return simulate("jsonl"); }},
      {"simulate_x0.5_seed20171018.csv", [&] { return simulate("csv"); }},
      {"table1_x0.5.csv", [&] { return table(1, 0.5, 0); }},
      {"table2_x1_rounds20000_seed7.csv", [&] { return table(2, 1.0, 20000); }},
      {"mi_curve_10.csv", mi},
      {"detect_seed11.csv", detect},
  };
  int matched = 0;
  for (const auto& [name, make] : outputs) {
    const auto first = make(), second = make();
    o.require(first == second, name + " identical across runs");
    const auto golden = std::filesystem::path(MBQKD_GOLDEN_DIR) / name;
    o.require(std::filesystem::exists(golden) && slurp(golden) == first, name + " matches golden file");
    matched += first == second && slurp(golden) == first;
  }
  o.note(std::to_string(matched) + "/" + std::to_string(outputs.size()) + " outputs byte-identical to golden files");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"1 discriminator determinism", discriminator_determinism},
      {"2 Eve reading probabilities", eve_reading_probabilities},
      {"3 joint tables (no HWPs, both HWPs) by simulation", table_reproduction},
      {"4 information anchors", information_anchors},
      {"5 crossover", crossover_point},
      {"6 tables to information consistency", tables_to_information},
      {"7 control-mode detection", detection_escape},
      {"8 physics identities", physics_identities},
      {"9 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
