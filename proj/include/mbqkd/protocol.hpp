#pragma once

// Session engine: Bob prepares Psi-, Alice encodes on the travel photon, both
// randomly insert their HWP(pi/8), Bob discriminates; afterwards the rounds
// are sifted into key material (same bases) and control data (different bases).

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mbqkd/adversary.hpp"
#include "mbqkd/devices.hpp"
#include "mbqkd/errors.hpp"
#include "mbqkd/fock.hpp"
#include "mbqkd/random.hpp"

namespace mbqkd {

struct BasisPair {
  BasisChoice bob = BasisChoice::Plain;
  BasisChoice alice = BasisChoice::Plain;
  bool operator==(const BasisPair&) const = default;
};

struct SessionConfig {
  std::uint64_t n_rounds = 0;
  double eve_presence = 0.0;
  bool attack_enabled = true;
  std::uint64_t seed = 0;
  // P(chi1..chi4). chi3 and chi4 come from the same heralded encoder, so only
  // their sum is honoured; heralding splits it evenly.
  std::array<double, 4> symbol_priors{0.25, 0.25, 0.25, 0.25};
  // Pin both scramblers instead of drawing them (per-configuration statistics).
  std::optional<BasisPair> fixed_bases;

  void validate() const {
    validate_presence(eve_presence);
    double sum = 0.0;
    for (double p : symbol_priors) {
      if (!(p >= 0.0)) throw ValidationError("symbol priors must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("symbol priors must sum to 1");
  }
};

enum class RoundKind : std::uint8_t { SameBasis, DifferentBasis };

constexpr std::string_view to_string(RoundKind k) {
  return k == RoundKind::SameBasis ? "same_basis" : "different_basis";
}

struct RoundRecord {
  std::uint64_t round_id = 0;
  BasisChoice bob_basis = BasisChoice::Plain;
  BasisChoice alice_basis = BasisChoice::Plain;
  MixedBasisSymbol alice_symbol = MixedBasisSymbol::Chi1;
  bool eve_active = false;
  std::optional<MixedBasisSymbol> eve_symbol;  // what Eve read
  std::optional<MixedBasisSymbol> eve_resent;  // what Eve's re-encoding realized
  MixedBasisSymbol bob_outcome = MixedBasisSymbol::Chi1;
  RoundKind kind = RoundKind::SameBasis;

  bool operator==(const RoundRecord&) const = default;
};

struct RoundChoices {
  BasisPair bases;
  EncoderAction action = EncoderAction::Identity;
  bool eve_active = false;
};

// Draw order is fixed (Bob's basis, Alice's basis, encoder, Eve gate) so that
// transcripts are reproducible from the round stream alone.
inline RoundChoices draw_choices(const SessionConfig& config, RandomStream& rng) {
  RoundChoices c;
  c.bases.bob = rng.bernoulli(0.5) ? BasisChoice::Hadamard : BasisChoice::Plain;
  c.bases.alice = rng.bernoulli(0.5) ? BasisChoice::Hadamard : BasisChoice::Plain;
  if (config.fixed_bases) c.bases = *config.fixed_bases;
  const double u = rng.uniform();
  const auto& pr = config.symbol_priors;
  c.action = u < pr[0]           ? EncoderAction::Identity
             : u < pr[0] + pr[1] ? EncoderAction::HalfWavePlate0
                                 : EncoderAction::MeasureAndReplace;
  c.eve_active = config.attack_enabled && eve_presence_gate(config.eve_presence, rng);
  return c;
}

inline RoundRecord play_round(const RoundChoices& choices, std::uint64_t round_id, RandomStream& rng) {
  RoundRecord r;
  r.round_id = round_id;
  r.bob_basis = choices.bases.bob;
  r.alice_basis = choices.bases.alice;
  r.kind = choices.bases.bob == choices.bases.alice ? RoundKind::SameBasis : RoundKind::DifferentBasis;
  r.eve_active = choices.eve_active;

  const TwoPhotonState bob_pair = mixed_basis_state(MixedBasisSymbol::Chi1);
  TwoPhotonState arriving = bob_pair;
  if (choices.eve_active) {
    const auto eve = eve_intercept_round({bob_pair, choices.action, choices.bases.alice}, rng);
    r.alice_symbol = eve.alice_realized;
    r.eve_symbol = eve.read_symbol;
    r.eve_resent = eve.resent_symbol;
    arriving = eve.state_to_bob;
  } else {
    const auto alice = encode(choices.action, bob_pair, rng);
    r.alice_symbol = alice.realized;
    arriving = apply_basis(alice.state, choices.bases.alice);
  }
  r.bob_outcome = discriminate(apply_basis(arriving, choices.bases.bob), rng).symbol;
  return r;
}

inline RoundRecord run_round(const SessionConfig& config, std::uint64_t round_id, RandomStream& rng) {
  config.validate();
  return play_round(draw_choices(config, rng), round_id, rng);
}

inline std::vector<RoundRecord> run_session(const SessionConfig& config) {
  config.validate();
  std::vector<RoundRecord> out;
  out.reserve(config.n_rounds);
  for (std::uint64_t id = 0; id < config.n_rounds; ++id) {
    auto rng = RandomStream::for_round(config.seed, id);
    out.push_back(play_round(draw_choices(config, rng), id, rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Control mode

// Exact no-Eve distribution of Bob's outcome for a sent symbol and basis pair.
inline const std::array<double, 4>& ideal_outcome_distribution(MixedBasisSymbol sent, BasisPair bases) {
  using Table = std::array<std::array<std::array<std::array<double, 4>, 2>, 2>, 4>;
  static const Table table = [] {
    Table t{};
    for (auto s : kAllSymbols)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const auto state = apply_basis(apply_basis(mixed_basis_state(s), static_cast<BasisChoice>(a)),
                                         static_cast<BasisChoice>(b));
          t[index_of(s)][a][b] = symbol_probabilities(state);
        }
    return t;
  }();
  return table[index_of(sent)][static_cast<int>(bases.alice)][static_cast<int>(bases.bob)];
}

// An outcome the ideal channel cannot produce (e.g. chi3 arriving as chi4).
inline bool is_bitflip(const RoundRecord& r) {
  return ideal_outcome_distribution(r.alice_symbol, {r.bob_basis, r.alice_basis})[index_of(r.bob_outcome)] <=
         kExactTolerance;
}

struct ControlStats {
  std::array<std::uint64_t, 4> rounds{};  // by Alice's symbol
  std::array<std::uint64_t, 4> flips{};
};

struct ControlReport {
  bool eve_detected = false;
  std::uint64_t bitflip_count = 0;
  ControlStats per_symbol;
};

inline ControlReport control_check(std::span<const RoundRecord> control_records) {
  ControlReport rep;
  for (const auto& r : control_records) {
    const auto s = index_of(r.alice_symbol);
    ++rep.per_symbol.rounds[s];
    if (is_bitflip(r)) {
      ++rep.per_symbol.flips[s];
      ++rep.bitflip_count;
    }
  }
  rep.eve_detected = rep.bitflip_count > 0;
  return rep;
}

struct SiftResult {
  std::vector<MixedBasisSymbol> key_symbols;
  std::vector<RoundRecord> control_records;
  bool eve_detected = false;
  std::uint64_t bitflip_count = 0;
  ControlStats per_symbol;
};

inline SiftResult sift(std::span<const RoundRecord> transcript) {
  SiftResult out;
  for (const auto& r : transcript) {
    if (r.kind == RoundKind::SameBasis)
      out.key_symbols.push_back(r.bob_outcome);
    else
      out.control_records.push_back(r);
  }
  const auto rep = control_check(out.control_records);
  out.eve_detected = rep.eve_detected;
  out.bitflip_count = rep.bitflip_count;
  out.per_symbol = rep.per_symbol;
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo detection statistics

struct EscapeEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
};

inline EscapeEstimate make_escape_estimate(std::uint64_t escaped, std::uint64_t trials) {
  if (trials == 0) return {};
  const double p = static_cast<double>(escaped) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

// Control cycles: chi1, chi2 and two heralded chi3/chi4 sendings, each in a
// random different-basis configuration. Eve escapes a trial if none of its
// `cycles` cycles shows a bit flip.
inline EscapeEstimate estimate_cycle_escape(double x, std::uint64_t cycles, std::uint64_t trials,
                                            std::uint64_t seed) {
  validate_presence(x);
  static constexpr std::array<EncoderAction, 4> cycle = {EncoderAction::Identity, EncoderAction::HalfWavePlate0,
                                                          EncoderAction::MeasureAndReplace,
                                                          EncoderAction::MeasureAndReplace};
  std::uint64_t escaped = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = RandomStream::for_round(seed, t);
    bool seen = false;
    for (std::uint64_t c = 0; c < cycles && !seen; ++c)
      for (auto action : cycle) {
        RoundChoices ch;
        ch.bases = rng.bernoulli(0.5) ? BasisPair{BasisChoice::Hadamard, BasisChoice::Plain}
                                      : BasisPair{BasisChoice::Plain, BasisChoice::Hadamard};
        ch.action = action;
        ch.eve_active = rng.bernoulli(x);
        if (is_bitflip(play_round(ch, c, rng))) {
          seen = true;
          break;
        }
      }
    if (!seen) ++escaped;
  }
  return make_escape_estimate(escaped, trials);
}

// A character is 8 bits = 4 sifted key symbols. Eve escapes a trial when no
// control round shows a flip before `characters` characters are sifted.
inline EscapeEstimate estimate_character_escape(double x, std::uint64_t characters, std::uint64_t trials,
                                                std::uint64_t seed) {
  validate_presence(x);
  SessionConfig cfg;
  cfg.eve_presence = x;
  std::uint64_t escaped = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto rng = RandomStream::for_round(seed, t);
    std::uint64_t keys = 0;
    bool seen = false;
    for (std::uint64_t id = 0; keys < 4 * characters && !seen; ++id) {
      const auto r = play_round(draw_choices(cfg, rng), id, rng);
      if (r.kind == RoundKind::SameBasis)
        ++keys;
      else
        seen = is_bitflip(r);
    }
    if (!seen) ++escaped;
  }
  return make_escape_estimate(escaped, trials);
}

}  // namespace mbqkd
