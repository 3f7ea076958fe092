#pragma once

// Two-photon states over four optical modes (two spatial sides x two
// polarizations), evolved by linear optics and measured by the Born rule.

#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "mbqkd/errors.hpp"
#include "mbqkd/random.hpp"

namespace mbqkd {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

enum class Side : std::uint8_t { Side1 = 0, Side2 = 1 };
enum class Polarization : std::uint8_t { H = 0, V = 1 };

// Bob keeps the home photon on Side1; the travel photon goes to Alice and back on Side2.
inline constexpr Side kHomeSide = Side::Side1;
inline constexpr Side kTravelSide = Side::Side2;

inline constexpr Side other(Side s) { return s == Side::Side1 ? Side::Side2 : Side::Side1; }
inline constexpr Polarization flipped(Polarization p) {
  return p == Polarization::H ? Polarization::V : Polarization::H;
}

struct OpticalMode {
  Side spatial = Side::Side1;
  Polarization polarization = Polarization::H;

  // Side1H < Side1V < Side2H < Side2V
  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(spatial) + static_cast<std::size_t>(polarization);
  }
  static constexpr OpticalMode from_index(std::size_t i) {
    return {static_cast<Side>(i / 2), static_cast<Polarization>(i % 2)};
  }
  constexpr auto operator<=>(const OpticalMode& o) const { return index() <=> o.index(); }
  constexpr bool operator==(const OpticalMode& o) const { return index() == o.index(); }
};

inline constexpr std::size_t kModeCount = 4;
inline constexpr std::size_t kFockDim = 10;

// Two photons in modes (first <= second); first == second is a doubly occupied mode.
struct FockBasisElement {
  OpticalMode first;
  OpticalMode second;

  constexpr bool bunched() const { return first == second; }
  constexpr int photons_on(Side s) const {
    return (first.spatial == s ? 1 : 0) + (second.spatial == s ? 1 : 0);
  }
  constexpr bool operator==(const FockBasisElement&) const = default;
};

namespace detail {
constexpr std::array<FockBasisElement, kFockDim> make_fock_basis() {
  std::array<FockBasisElement, kFockDim> out{};
  std::size_t n = 0;
  for (std::size_t a = 0; a < kModeCount; ++a)
    for (std::size_t b = a; b < kModeCount; ++b)
      out[n++] = {OpticalMode::from_index(a), OpticalMode::from_index(b)};
  return out;
}
}  // namespace detail

// Canonical enumeration: lexicographic in (first, second).
inline constexpr std::array<FockBasisElement, kFockDim> kFockBasis = detail::make_fock_basis();

constexpr std::size_t fock_index(OpticalMode a, OpticalMode b) {
  std::size_t lo = a.index(), hi = b.index();
  if (lo > hi) std::swap(lo, hi);
  // rows before `lo` hold 4, 3, 2, 1 elements
  std::size_t offset = 0;
  for (std::size_t r = 0; r < lo; ++r) offset += kModeCount - r;
  return offset + (hi - lo);
}

using Amplitudes = std::array<Complex, kFockDim>;
using PolarizationAmplitudes = std::array<Complex, 2>;  // {H, V}

class TwoPhotonState {
 public:
  // Checks finiteness and unit norm (within kNormTolerance).
  static TwoPhotonState from_amplitudes(const Amplitudes& amps) {
    for (const auto& c : amps)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw ContractViolation("two-photon state has a non-finite amplitude");
    TwoPhotonState s(amps);
    if (std::abs(s.norm() - 1.0) > kNormTolerance)
      throw ContractViolation("two-photon state is not normalized (norm " + std::to_string(s.norm()) + ")");
    return s;
  }

  // Rescales to unit norm; throws on the zero vector.
  static TwoPhotonState normalized(Amplitudes amps) {
    double n = 0.0;
    for (const auto& c : amps) n += std::norm(c);
    if (!(n > 0.0) || !std::isfinite(n)) throw ContractViolation("cannot normalize a zero or non-finite vector");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& c : amps) c *= scale;
    return TwoPhotonState(amps);
  }

  // One photon on each side with the given single-photon polarization states.
  static TwoPhotonState product(const PolarizationAmplitudes& side1, const PolarizationAmplitudes& side2) {
    Amplitudes amps{};
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t q = 0; q < 2; ++q)
        amps[fock_index({Side::Side1, static_cast<Polarization>(p)}, {Side::Side2, static_cast<Polarization>(q)})] =
            side1[p] * side2[q];
    return normalized(amps);
  }

  static TwoPhotonState product(Polarization side1, Polarization side2) {
    PolarizationAmplitudes a{}, b{};
    a[static_cast<std::size_t>(side1)] = 1.0;
    b[static_cast<std::size_t>(side2)] = 1.0;
    return product(a, b);
  }

  const Amplitudes& amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }
  Complex amplitude(OpticalMode a, OpticalMode b) const { return amps_[fock_index(a, b)]; }

  double norm() const {
    double n = 0.0;
    for (const auto& c : amps_) n += std::norm(c);
    return std::sqrt(n);
  }

  // Born probability of each basis element.
  std::array<double, kFockDim> probabilities() const {
    std::array<double, kFockDim> p{};
    for (std::size_t i = 0; i < kFockDim; ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

 private:
  explicit TwoPhotonState(const Amplitudes& amps) : amps_(amps) {}
  friend TwoPhotonState unchecked_state(const Amplitudes& amps);

  Amplitudes amps_{};
};

inline TwoPhotonState unchecked_state(const Amplitudes& amps) { return TwoPhotonState(amps); }

inline Complex inner(const TwoPhotonState& a, const TwoPhotonState& b) {
  Complex s{};
  for (std::size_t i = 0; i < kFockDim; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double overlap_probability(const TwoPhotonState& a, const TwoPhotonState& b) {
  if (std::abs(a.norm() - 1.0) > kNormTolerance || std::abs(b.norm() - 1.0) > kNormTolerance)
    throw ContractViolation("overlap_probability needs normalized states");
  return std::norm(inner(a, b));
}

// Equality up to global phase.
inline bool same_state(const TwoPhotonState& a, const TwoPhotonState& b, double tol = kNormTolerance) {
  return std::abs(overlap_probability(a, b) - 1.0) <= tol;
}

// Probability that the two photons sit on different sides.
inline double split_probability(const TwoPhotonState& s) {
  double p = 0.0;
  for (std::size_t i = 0; i < kFockDim; ++i)
    if (kFockBasis[i].photons_on(Side::Side1) == 1) p += std::norm(s[i]);
  return p;
}

// ---------------------------------------------------------------------------
// Mode transformations

using ModeMatrix = std::array<std::array<Complex, kModeCount>, kModeCount>;

// Linear map on creation operators: a+_c -> sum_r m[r][c] a+_r. Column c is the
// image of mode c. Only unitary matrices can be constructed.
class ModeUnitary {
 public:
  static ModeUnitary identity() {
    ModeMatrix m{};
    for (std::size_t i = 0; i < kModeCount; ++i) m[i][i] = 1.0;
    return ModeUnitary(m);
  }

  static ModeUnitary from_matrix(const ModeMatrix& m) {
    for (std::size_t i = 0; i < kModeCount; ++i)
      for (std::size_t j = 0; j < kModeCount; ++j) {
        Complex s{};
        for (std::size_t r = 0; r < kModeCount; ++r) s += std::conj(m[r][i]) * m[r][j];
        const Complex expected = (i == j) ? 1.0 : 0.0;
        if (std::abs(s - expected) > kNormTolerance) throw ContractViolation("mode matrix is not unitary");
      }
    return ModeUnitary(m);
  }

  const ModeMatrix& matrix() const { return m_; }
  const Complex& operator()(std::size_t row, std::size_t col) const { return m_[row][col]; }

  // (v * u) applies u first, then v.
  friend ModeUnitary operator*(const ModeUnitary& v, const ModeUnitary& u) {
    ModeMatrix out{};
    for (std::size_t i = 0; i < kModeCount; ++i)
      for (std::size_t j = 0; j < kModeCount; ++j)
        for (std::size_t k = 0; k < kModeCount; ++k) out[i][j] += v.m_[i][k] * u.m_[k][j];
    return ModeUnitary(out);
  }

 private:
  explicit ModeUnitary(const ModeMatrix& m) : m_(m) {}
  ModeMatrix m_{};
};

// The state is sum_{ij} S_ij a+_i a+_j |0> with S symmetric; a mode map U sends
// S to U S U^T. Bunched elements carry the 1/sqrt(2) of a+^2|0>/sqrt(2).
inline TwoPhotonState apply_mode_unitary(const TwoPhotonState& state, const ModeUnitary& u) {
  ModeMatrix s{};
  for (std::size_t n = 0; n < kFockDim; ++n) {
    const auto a = kFockBasis[n].first.index(), b = kFockBasis[n].second.index();
    if (a == b) {
      s[a][a] = state[n] * kInvSqrt2;
    } else {
      s[a][b] = state[n] * 0.5;
      s[b][a] = state[n] * 0.5;
    }
  }
  ModeMatrix us{};
  for (std::size_t i = 0; i < kModeCount; ++i)
    for (std::size_t j = 0; j < kModeCount; ++j)
      for (std::size_t k = 0; k < kModeCount; ++k) us[i][j] += u(i, k) * s[k][j];
  ModeMatrix t{};
  for (std::size_t i = 0; i < kModeCount; ++i)
    for (std::size_t j = 0; j < kModeCount; ++j)
      for (std::size_t k = 0; k < kModeCount; ++k) t[i][j] += us[i][k] * u(j, k);

  Amplitudes out{};
  for (std::size_t n = 0; n < kFockDim; ++n) {
    const auto a = kFockBasis[n].first.index(), b = kFockBasis[n].second.index();
    out[n] = (a == b) ? t[a][a] * std::numbers::sqrt2 : t[a][b] * 2.0;
  }
  return unchecked_state(out);
}

// 50:50 non-polarizing beam splitter, real convention:
// Side1 -> (Side1 + Side2)/sqrt2, Side2 -> (Side1 - Side2)/sqrt2, per polarization.
inline ModeUnitary beam_splitter_unitary() {
  ModeMatrix m{};
  for (std::size_t p = 0; p < 2; ++p) {
    const std::size_t s1 = p, s2 = 2 + p;
    m[s1][s1] = kInvSqrt2;
    m[s2][s1] = kInvSqrt2;
    m[s1][s2] = kInvSqrt2;
    m[s2][s2] = -kInvSqrt2;
  }
  return ModeUnitary::from_matrix(m);
}

// Half-wave plate with fast axis at `angle` on one side:
// H -> cos2a H + sin2a V, V -> sin2a H - cos2a V. angle 0 flips the sign of V,
// angle pi/8 is the Hadamard.
inline ModeUnitary half_wave_plate_unitary(Side side, double angle) {
  ModeMatrix m{};
  for (std::size_t i = 0; i < kModeCount; ++i) m[i][i] = 1.0;
  const std::size_t h = OpticalMode{side, Polarization::H}.index();
  const std::size_t v = OpticalMode{side, Polarization::V}.index();
  const double c = std::cos(2.0 * angle), s = std::sin(2.0 * angle);
  m[h][h] = c;
  m[v][h] = s;
  m[h][v] = s;
  m[v][v] = -c;
  return ModeUnitary::from_matrix(m);
}

inline constexpr double kHadamardAngle = std::numbers::pi / 8.0;

// ---------------------------------------------------------------------------
// Mixed basis

enum class MixedBasisSymbol : std::uint8_t { Chi1 = 0, Chi2 = 1, Chi3 = 2, Chi4 = 3 };

inline constexpr std::array<MixedBasisSymbol, 4> kAllSymbols = {MixedBasisSymbol::Chi1, MixedBasisSymbol::Chi2,
                                                                 MixedBasisSymbol::Chi3, MixedBasisSymbol::Chi4};

constexpr std::size_t index_of(MixedBasisSymbol s) { return static_cast<std::size_t>(s); }
constexpr MixedBasisSymbol symbol_at(std::size_t i) { return static_cast<MixedBasisSymbol>(i); }

constexpr std::string_view to_string(MixedBasisSymbol s) {
  constexpr std::array<std::string_view, 4> names = {"chi1", "chi2", "chi3", "chi4"};
  return names[index_of(s)];
}

// chi1 = Psi-, chi2 = Psi+, chi3 = HH, chi4 = VV (first slot Side1, second Side2).
inline TwoPhotonState mixed_basis_state(MixedBasisSymbol symbol) {
  using P = Polarization;
  const OpticalMode h1{Side::Side1, P::H}, v1{Side::Side1, P::V}, h2{Side::Side2, P::H}, v2{Side::Side2, P::V};
  Amplitudes a{};
  switch (symbol) {
    case MixedBasisSymbol::Chi1:
      a[fock_index(h1, v2)] = kInvSqrt2;
      a[fock_index(v1, h2)] = -kInvSqrt2;
      break;
    case MixedBasisSymbol::Chi2:
      a[fock_index(h1, v2)] = kInvSqrt2;
      a[fock_index(v1, h2)] = kInvSqrt2;
      break;
    case MixedBasisSymbol::Chi3:
      a[fock_index(h1, h2)] = 1.0;
      break;
    case MixedBasisSymbol::Chi4:
      a[fock_index(v1, v2)] = 1.0;
      break;
  }
  return TwoPhotonState::from_amplitudes(a);
}

// ---------------------------------------------------------------------------
// Polarization measurement of a single photon

struct PolarizationReading {
  Polarization outcome;
  TwoPhotonState collapsed;  // projected onto the outcome and renormalized
};

namespace detail {
inline void require_one_photon_per_side(const TwoPhotonState& state, Side side) {
  for (std::size_t n = 0; n < kFockDim; ++n)
    if (std::norm(state[n]) > kExactTolerance && kFockBasis[n].photons_on(side) != 1)
      throw UnsupportedMeasurement("state does not hold exactly one photon on the measured side");
}
}  // namespace detail

// Projective H/V measurement of the photon on `side`. Requires exactly one
// photon there (and hence one on the other side).
inline PolarizationReading measure_polarization(const TwoPhotonState& state, Side side, RandomStream& rng) {
  detail::require_one_photon_per_side(state, side);
  double p_h = 0.0;
  for (std::size_t n = 0; n < kFockDim; ++n) {
    const auto& e = kFockBasis[n];
    const OpticalMode& mine = (e.first.spatial == side) ? e.first : e.second;
    if (e.photons_on(side) == 1 && mine.polarization == Polarization::H) p_h += std::norm(state[n]);
  }
  const Polarization outcome = rng.uniform() < p_h ? Polarization::H : Polarization::V;
  Amplitudes projected{};
  for (std::size_t n = 0; n < kFockDim; ++n) {
    const auto& e = kFockBasis[n];
    if (e.photons_on(side) != 1) continue;
    const OpticalMode& mine = (e.first.spatial == side) ? e.first : e.second;
    if (mine.polarization == outcome) projected[n] = state[n];
  }
  return {outcome, TwoPhotonState::normalized(projected)};
}

// Destroys the (already measured) photon on `side` and puts a fresh photon of
// polarization `fresh` in its place. The photon on `side` must be in a
// definite polarization.
inline TwoPhotonState replace_photon(const TwoPhotonState& collapsed, Side side, Polarization fresh) {
  detail::require_one_photon_per_side(collapsed, side);
  std::array<PolarizationAmplitudes, 2> rest{};  // indexed by the old polarization on `side`
  std::array<double, 2> weight{};
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      const OpticalMode mine{side, static_cast<Polarization>(p)};
      const OpticalMode theirs{other(side), static_cast<Polarization>(q)};
      const Complex c = collapsed.amplitude(mine, theirs);
      rest[p][q] = c;
      weight[p] += std::norm(c);
    }
  if (weight[0] > kExactTolerance && weight[1] > kExactTolerance)
    throw UnsupportedMeasurement("photon to replace is not in a definite polarization");
  const PolarizationAmplitudes& remaining = weight[0] > weight[1] ? rest[0] : rest[1];
  PolarizationAmplitudes injected{};
  injected[static_cast<std::size_t>(fresh)] = 1.0;
  return side == Side::Side1 ? TwoPhotonState::product(injected, remaining)
                             : TwoPhotonState::product(remaining, injected);
}

}  // namespace mbqkd
