#pragma once

// Security analysis: closed-form joint tables p(j,k,m) for Alice's symbol j,
// Eve's re-sent symbol k (or none) and Bob's outcome m; Shannon informations;
// the I_AB / I_AE crossover; control-mode escape probabilities; and the
// Monte-Carlo estimators of the same quantities from session transcripts.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <algorithm>
#include <string>
#include <span>
#include <string_view>

#include "mbqkd/errors.hpp"
#include "mbqkd/fock.hpp"
#include "mbqkd/protocol.hpp"

namespace mbqkd {

enum class BasisConfig : std::uint8_t { NoHWP, BothHWP };

constexpr std::string_view to_string(BasisConfig c) { return c == BasisConfig::NoHWP ? "no_hwp" : "both_hwp"; }

inline constexpr BasisPair bases_of(BasisConfig c) {
  return c == BasisConfig::NoHWP ? BasisPair{BasisChoice::Plain, BasisChoice::Plain}
                                 : BasisPair{BasisChoice::Hadamard, BasisChoice::Hadamard};
}

// k index 4 means "Eve not in the line".
inline constexpr std::size_t kEveNone = 4;
inline constexpr std::size_t kEveSlots = 5;

// Rows a (sender), columns b (receiver).
using ProbabilityTable = std::array<std::array<double, 4>, 4>;

struct JointDistribution {
  using Table = std::array<std::array<std::array<double, 4>, kEveSlots>, 4>;  // [j][k][m]

  BasisConfig config = BasisConfig::NoHWP;
  double x = 0.0;
  Table p{};

  double at(std::size_t j, std::size_t k, std::size_t m) const { return p[j][k][m]; }

  double total() const {
    double s = 0.0;
    for (const auto& jk : p)
      for (const auto& km : jk)
        for (double v : km) s += v;
    return s;
  }

  ProbabilityTable alice_bob() const {
    ProbabilityTable t{};
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < kEveSlots; ++k)
        for (std::size_t m = 0; m < 4; ++m) t[j][m] += p[j][k][m];
    return t;
  }

  // Eve-present cells only; sums to x.
  ProbabilityTable alice_eve() const {
    ProbabilityTable t{};
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t m = 0; m < 4; ++m) t[j][k] += p[j][k][m];
    return t;
  }
};

namespace detail {
using Conditional = std::array<std::array<double, 4>, 4>;  // [given][outcome]

// Which symbol Eve's re-encoding realizes, given what Alice sent.
inline constexpr Conditional kResendNoHwp = {{
    {1.0, 0.0, 0.0, 0.0},
    {0.0, 1.0, 0.0, 0.0},
    {0.0, 0.0, 0.5, 0.5},
    {0.0, 0.0, 0.5, 0.5},
}};
inline constexpr Conditional kResendBothHwp = {{
    {0.0, 0.5, 0.25, 0.25},
    {0.5, 0.0, 0.25, 0.25},
    {0.25, 0.25, 0.25, 0.25},
    {0.25, 0.25, 0.25, 0.25},
}};
// Bob's reading of Eve's pair behind his own scrambler.
inline constexpr Conditional kBobNoHwp = {{
    {1.0, 0.0, 0.0, 0.0},
    {0.0, 1.0, 0.0, 0.0},
    {0.0, 0.0, 1.0, 0.0},
    {0.0, 0.0, 0.0, 1.0},
}};
inline constexpr Conditional kBobBothHwp = {{
    {0.0, 0.5, 0.25, 0.25},
    {0.5, 0.0, 0.25, 0.25},
    {0.25, 0.25, 0.5, 0.0},
    {0.25, 0.25, 0.0, 0.5},
}};

inline double xlog2x(double v) { return v > 0.0 ? v * std::log2(v) : 0.0; }

inline double entropy_terms(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}
}  // namespace detail

// Uniform priors. Every entry is affine in x: the Eve-free share (1-x)/4 sits
// on k = none, m = j; the rest is x/4 * P(resent k | j) * P(bob m | k).
inline JointDistribution joint_distribution_closed_form(double x, BasisConfig config) {
  validate_presence(x);
  const auto& resend = config == BasisConfig::NoHWP ? detail::kResendNoHwp : detail::kResendBothHwp;
  const auto& bob = config == BasisConfig::NoHWP ? detail::kBobNoHwp : detail::kBobBothHwp;
  JointDistribution d;
  d.config = config;
  d.x = x;
  for (std::size_t j = 0; j < 4; ++j) {
    d.p[j][kEveNone][j] = (1.0 - x) / 4.0;
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t m = 0; m < 4; ++m) d.p[j][k][m] = x / 4.0 * resend[j][k] * bob[k][m];
  }
  return d;
}

// -sum p log2 p over a probability vector; 0 log 0 = 0.
inline double shannon_entropy(std::span<const double> marginal) {
  double sum = 0.0;
  for (double v : marginal) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("probabilities must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("probabilities must sum to 1");
  return detail::entropy_terms(marginal);
}

enum class MiConvention : std::uint8_t {
  // H(A) + H(B) - H(A,B) on a normalized table.
  Standard,
  // H(A_B) := H(B), so I = 2 H(B) - H(A,B), with both entropies summed over
  // the cells of the table as given. Used for Alice-Eve with the Eve-absent
  // cells left out, which yields H(E) = 2X - X log2 X under uniform priors.
  ReceiverEntropy,
};

inline double mutual_information(const ProbabilityTable& joint, MiConvention convention = MiConvention::Standard) {
  double sum = 0.0;
  std::array<double, 4> row{}, col{};
  std::array<double, 16> cells{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const double v = joint[a][b];
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("joint table entries must be finite and non-negative");
      sum += v;
      row[a] += v;
      col[b] += v;
      cells[4 * a + b] = v;
    }
  const double h_joint = detail::entropy_terms(cells);
  if (convention == MiConvention::Standard) {
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("joint table must sum to 1");
    return detail::entropy_terms(row) + detail::entropy_terms(col) - h_joint;
  }
  if (sum > 1.0 + 1e-9) throw ValidationError("joint table mass exceeds 1");
  return 2.0 * detail::entropy_terms(col) - h_joint;
}

inline double iab_closed_form(double x) {
  validate_presence(x);
  using detail::xlog2x;
  return 0.5 + x / 8.0 +
         (15.0 * xlog2x(x) + 4.0 * xlog2x(2.0 - x) + 2.0 * xlog2x(4.0 - 3.0 * x) + xlog2x(8.0 - 5.0 * x)) / 32.0;
}

inline double iae_closed_form(double x) {
  validate_presence(x);
  return 7.0 * x / 8.0 - detail::xlog2x(x);
}

// Eve's entropy with only her present cells counted.
inline double eve_entropy_closed_form(double x) {
  validate_presence(x);
  return 2.0 * x - detail::xlog2x(x);
}

struct InformationPair {
  double i_ab = 0.0;
  double i_ae = 0.0;
};

// Mean over the two same-basis configurations of the informations evaluated
// directly on the closed-form tables.
inline InformationPair mi_from_tables(double x) {
  InformationPair out;
  for (auto c : {BasisConfig::NoHWP, BasisConfig::BothHWP}) {
    const auto d = joint_distribution_closed_form(x, c);
    out.i_ab += 0.5 * mutual_information(d.alice_bob(), MiConvention::ReceiverEntropy);
    out.i_ae += 0.5 * mutual_information(d.alice_eve(), MiConvention::ReceiverEntropy);
  }
  return out;
}

// Root of I_AB - I_AE on (0, 1). The difference is +2 at 0 and about -0.1 at 1.
inline double crossover() {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (iab_closed_form(mid) - iae_closed_form(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Disturbance D = X / 2 at presence X.
inline double disturbance(double x) { return x / 2.0; }

// Per cycle Eve escapes chi1 and chi2 always and each chi3/chi4 sending with
// 1 - x/4 (she is present with x and flips with 1/4): (3/4)^2 at x = 1.
inline double detection_escape_probability(std::uint64_t n_cycles, double x = 1.0) {
  validate_presence(x);
  const double per_sending = 1.0 - x / 4.0;
  return std::pow(per_sending * per_sending, static_cast<double>(n_cycles));
}

// Fixed constant for snatching one 8-bit character undetected.
inline double detection_escape_per_character() { return std::pow(0.53 / 1.54, 8); }

// ---------------------------------------------------------------------------
// Estimators from transcripts

struct JointEstimate {
  JointDistribution distribution;  // frequencies
  JointDistribution::Table standard_error{};
  std::uint64_t rounds = 0;
};

// Uses the same-basis rounds of one configuration; k is Eve's re-sent symbol.
inline JointEstimate estimate_joint_from_transcript(std::span<const RoundRecord> transcript, BasisConfig config,
                                                    double x = 0.0) {
  if (transcript.empty()) throw ValidationError("transcript is empty");
  const BasisPair want = bases_of(config);
  JointEstimate est;
  est.distribution.config = config;
  est.distribution.x = x;
  std::array<std::array<std::array<std::uint64_t, 4>, kEveSlots>, 4> counts{};
  for (const auto& r : transcript) {
    if (BasisPair{r.bob_basis, r.alice_basis} != want) continue;
    const std::size_t k = (r.eve_active && r.eve_resent) ? index_of(*r.eve_resent) : kEveNone;
    ++counts[index_of(r.alice_symbol)][k][index_of(r.bob_outcome)];
    ++est.rounds;
  }
  if (est.rounds == 0) throw ValidationError("transcript has no rounds in configuration " + std::string(to_string(config)));
  const double n = static_cast<double>(est.rounds);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < kEveSlots; ++k)
      for (std::size_t m = 0; m < 4; ++m) {
        const double f = static_cast<double>(counts[j][k][m]) / n;
        est.distribution.p[j][k][m] = f;
        est.standard_error[j][k][m] = std::sqrt(f * (1.0 - f) / n);
      }
  return est;
}

struct MutualInformationReport {
  double x = 0.0;
  double i_ab_closed = 0.0;
  double i_ae_closed = 0.0;
  double i_ab_estimate = 0.0;
  double i_ab_stderr = 0.0;
  double i_ae_estimate = 0.0;
  double i_ae_stderr = 0.0;
  double h_b = 0.0;
  double h_e = 0.0;
};

namespace detail {
// Plug-in ReceiverEntropy information and its delta-method variance. `table`
// holds multinomial cell frequencies over n rounds; mass missing from it (Eve
// absent) has zero gradient and drops out of both moments.
struct PlugIn {
  double value = 0.0;
  double variance = 0.0;
};

inline PlugIn receiver_entropy_plugin(const ProbabilityTable& table, double n) {
  PlugIn out;
  out.value = mutual_information(table, MiConvention::ReceiverEntropy);
  std::array<double, 4> col{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) col[b] += table[a][b];
  // dI/dp_ab = log2 p_ab - 2 log2 q_b - 1/ln2; excluded cells have zero gradient.
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const double p = table[a][b];
      if (p <= 0.0) continue;
      const double g = std::log2(p) - 2.0 * std::log2(col[b]) - 1.0 / std::numbers::ln2;
      e1 += p * g;
      e2 += p * g * g;
    }
  out.variance = n > 0.0 ? std::max(0.0, e2 - e1 * e1) / n : 0.0;
  return out;
}
}  // namespace detail

// Averages the two same-basis configurations with weight 1/2, like the closed
// form; closed-form columns are evaluated at the nominal presence x.
inline MutualInformationReport estimate_mi_from_transcript(std::span<const RoundRecord> transcript, double x) {
  validate_presence(x);
  if (transcript.empty()) throw ValidationError("transcript is empty");
  MutualInformationReport rep;
  rep.x = x;
  rep.i_ab_closed = iab_closed_form(x);
  rep.i_ae_closed = iae_closed_form(x);
  rep.h_b = 2.0;
  rep.h_e = eve_entropy_closed_form(x);
  double var_ab = 0.0, var_ae = 0.0;
  for (auto c : {BasisConfig::NoHWP, BasisConfig::BothHWP}) {
    const auto est = estimate_joint_from_transcript(transcript, c, x);
    const double n = static_cast<double>(est.rounds);
    const auto ab = detail::receiver_entropy_plugin(est.distribution.alice_bob(), n);
    const auto ae = detail::receiver_entropy_plugin(est.distribution.alice_eve(), n);
    rep.i_ab_estimate += 0.5 * ab.value;
    rep.i_ae_estimate += 0.5 * ae.value;
    var_ab += 0.25 * ab.variance;
    var_ae += 0.25 * ae.variance;
  }
  rep.i_ab_stderr = std::sqrt(var_ab);
  rep.i_ae_stderr = std::sqrt(var_ae);
  return rep;
}

}  // namespace mbqkd
