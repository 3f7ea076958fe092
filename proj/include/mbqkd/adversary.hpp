#pragma once

// Delay-substitute-read-resend attack. Eve holds back Bob's travel photon,
// lets Alice encode on a photon from her own Psi- pair, reads the message with
// her own discriminator and re-encodes the reading onto Bob's delayed pair.

#include <optional>

#include "mbqkd/devices.hpp"
#include "mbqkd/errors.hpp"
#include "mbqkd/fock.hpp"
#include "mbqkd/random.hpp"

namespace mbqkd {

struct EveState {
  TwoPhotonState delayed_pair;     // Bob's home photon + his travel photon, held by Eve
  TwoPhotonState substitute_pair;  // Eve's Psi- pair; its travel photon goes to Alice
  std::optional<MixedBasisSymbol> read_symbol;
};

inline void validate_presence(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("Eve presence X must lie in [0, 1]");
}

// True when Eve intercepts this round.
inline bool eve_presence_gate(double x, RandomStream& rng) {
  validate_presence(x);
  return rng.bernoulli(x);
}

// Eve holds both photons of her substitute pair and runs the full discriminator.
inline MixedBasisSymbol eve_read(const TwoPhotonState& travel_from_alice, RandomStream& rng) {
  return discriminate(travel_from_alice, rng).symbol;
}

struct Reencoding {
  TwoPhotonState state;
  MixedBasisSymbol resent;  // what Bob's pair actually became
};

// chi1/chi2 are imposed deterministically. For chi3/chi4 Eve can only measure
// her held travel photon and inject a photon matching the collapsed home
// photon, so she gets the symbol she read or its bit-flipped partner, 50:50.
inline Reencoding eve_reencode(const TwoPhotonState& delayed_pair, MixedBasisSymbol read, RandomStream& rng) {
  switch (read) {
    case MixedBasisSymbol::Chi1: {
      auto e = encode(EncoderAction::Identity, delayed_pair, rng);
      return {e.state, e.realized};
    }
    case MixedBasisSymbol::Chi2: {
      auto e = encode(EncoderAction::HalfWavePlate0, delayed_pair, rng);
      return {e.state, e.realized};
    }
    case MixedBasisSymbol::Chi3:
    case MixedBasisSymbol::Chi4: {
      auto e = encode(EncoderAction::MeasureAndReplace, delayed_pair, rng);
      return {e.state, e.realized};
    }
  }
  throw ContractViolation("unknown symbol");
}

struct InterceptContext {
  TwoPhotonState bob_pair;  // the pair Bob prepared; Eve delays it
  EncoderAction alice_action;
  BasisChoice alice_basis;
};

struct InterceptResult {
  TwoPhotonState state_to_bob;  // before Bob's own scrambler
  MixedBasisSymbol alice_realized;
  MixedBasisSymbol read_symbol;
  MixedBasisSymbol resent_symbol;
};

inline InterceptResult eve_intercept_round(const InterceptContext& ctx, RandomStream& rng) {
  EveState eve{ctx.bob_pair, mixed_basis_state(MixedBasisSymbol::Chi1), std::nullopt};
  const auto alice = encode(ctx.alice_action, eve.substitute_pair, rng);
  const auto leaving_alice = apply_basis(alice.state, ctx.alice_basis);
  eve.read_symbol = eve_read(leaving_alice, rng);
  const auto forwarded = eve_reencode(eve.delayed_pair, *eve.read_symbol, rng);
  return {forwarded.state, alice.realized, *eve.read_symbol, forwarded.resent};
}

}  // namespace mbqkd
