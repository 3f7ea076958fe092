#pragma once

// Optical instruments: the mixed-basis discriminator (BS + two PBS + four
// photon-number-resolving detectors), Alice's encoders and the HWP(pi/8)
// basis scramblers.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "mbqkd/errors.hpp"
#include "mbqkd/fock.hpp"
#include "mbqkd/random.hpp"

namespace mbqkd {

// Behind each BS output port a PBS transmits H to DxH and reflects V to DxV,
// so detector i watches optical mode i.
enum class Detector : std::uint8_t { D1H = 0, D1V = 1, D2H = 2, D2V = 3 };

struct DetectionPattern {
  std::array<std::uint8_t, 4> counts{};

  static DetectionPattern from_element(const FockBasisElement& e) {
    DetectionPattern p;
    ++p.counts[e.first.index()];
    ++p.counts[e.second.index()];
    return p;
  }
  int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  bool operator==(const DetectionPattern&) const = default;
};

inline std::string to_string(const DetectionPattern& p) {
  static constexpr std::array<std::string_view, 4> names = {"D1H", "D1V", "D2H", "D2V"};
  std::string out;
  for (std::size_t i = 0; i < 4; ++i)
    for (int c = 0; c < p.counts[i]; ++c) {
      if (!out.empty()) out += '+';
      out += names[i];
    }
  return out;
}

namespace detail {
// Returns -1 for patterns outside the four classes (split with equal polarizations).
inline int classify_index(const DetectionPattern& p) {
  const int side1 = p.counts[0] + p.counts[1];
  const int h = p.counts[0] + p.counts[2];
  if (side1 == 1) return h == 1 ? 0 : -1;  // split: opposite polarizations -> chi1
  if (h == 1) return 1;                     // same side, H and V -> chi2
  return h == 2 ? 2 : 3;                    // double click on an H or a V detector
}
}  // namespace detail

inline MixedBasisSymbol classify(const DetectionPattern& p) {
  if (p.total() != 2) throw ClassificationError("detection pattern must hold exactly two photons");
  const int k = detail::classify_index(p);
  if (k < 0) throw ClassificationError("unclassifiable detection pattern " + to_string(p));
  return symbol_at(static_cast<std::size_t>(k));
}

// Pattern probabilities at the four detectors, indexed like kFockBasis.
inline std::array<double, kFockDim> detection_probabilities(const TwoPhotonState& state) {
  return apply_mode_unitary(state, beam_splitter_unitary()).probabilities();
}

// Exact discriminator output distribution over chi1..chi4.
inline std::array<double, 4> symbol_probabilities(const TwoPhotonState& state) {
  const auto p = detection_probabilities(state);
  std::array<double, 4> out{};
  for (std::size_t n = 0; n < kFockDim; ++n) {
    const int k = detail::classify_index(DetectionPattern::from_element(kFockBasis[n]));
    if (k < 0) {
      if (p[n] > kExactTolerance) throw ClassificationError("state reaches an unclassifiable detection pattern");
      continue;
    }
    out[static_cast<std::size_t>(k)] += p[n];
  }
  return out;
}

struct Discrimination {
  MixedBasisSymbol symbol;
  DetectionPattern pattern;
};

inline Discrimination discriminate(const TwoPhotonState& state, RandomStream& rng) {
  const auto p = detection_probabilities(state);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = kFockDim;
  for (std::size_t n = 0; n < kFockDim; ++n) {
    if (p[n] <= 0.0) continue;
    acc += p[n];
    pick = n;
    if (u < acc) break;
  }
  const auto pattern = DetectionPattern::from_element(kFockBasis[pick]);
  return {classify(pattern), pattern};
}

// ---------------------------------------------------------------------------
// Encoders

enum class EncoderAction : std::uint8_t {
  Identity,           // -> chi1
  HalfWavePlate0,     // -> chi2
  MeasureAndReplace,  // -> chi3 or chi4, heralded
};

constexpr std::string_view to_string(EncoderAction a) {
  switch (a) {
    case EncoderAction::Identity: return "identity";
    case EncoderAction::HalfWavePlate0: return "hwp0";
    case EncoderAction::MeasureAndReplace: return "measure_replace";
  }
  return "?";
}

struct Encoding {
  TwoPhotonState state;
  MixedBasisSymbol realized;
};

// Measure the travel photon in H/V, then replace it with a fresh photon of the
// opposite polarization. The home photon has collapsed to that same
// polarization, so H heralds chi4 and V heralds chi3.
inline Encoding measure_and_replace(const TwoPhotonState& state, RandomStream& rng) {
  const auto reading = measure_polarization(state, kTravelSide, rng);
  const Polarization fresh = flipped(reading.outcome);
  return {replace_photon(reading.collapsed, kTravelSide, fresh),
          reading.outcome == Polarization::H ? MixedBasisSymbol::Chi4 : MixedBasisSymbol::Chi3};
}

inline Encoding encode(EncoderAction action, const TwoPhotonState& state, RandomStream& rng) {
  detail::require_one_photon_per_side(state, kTravelSide);
  switch (action) {
    case EncoderAction::Identity:
      return {state, MixedBasisSymbol::Chi1};
    case EncoderAction::HalfWavePlate0:
      return {apply_mode_unitary(state, half_wave_plate_unitary(kTravelSide, 0.0)), MixedBasisSymbol::Chi2};
    case EncoderAction::MeasureAndReplace:
      return measure_and_replace(state, rng);
  }
  throw ContractViolation("unknown encoder action");
}

inline TwoPhotonState hadamard_on_travel(const TwoPhotonState& state) {
  detail::require_one_photon_per_side(state, kTravelSide);
  return apply_mode_unitary(state, half_wave_plate_unitary(kTravelSide, kHadamardAngle));
}

// Basis scrambler choice: HWP(pi/8) absent or inserted on the travel path.
enum class BasisChoice : std::uint8_t { Plain = 0, Hadamard = 1 };

constexpr std::string_view to_string(BasisChoice b) { return b == BasisChoice::Plain ? "plain" : "hadamard"; }

inline TwoPhotonState apply_basis(const TwoPhotonState& state, BasisChoice b) {
  return b == BasisChoice::Hadamard ? hadamard_on_travel(state) : state;
}

}  // namespace mbqkd
