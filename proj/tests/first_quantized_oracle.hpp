#pragma once

// Test-only oracle: two labelled photons, wavefunction psi[a][b] over
// (mode of photon 1, mode of photon 2), kept symmetric. Evolves with
// U (x) U and reads detector probabilities by summing ordered pairs. Shares no
// code with the Fock-space engine beyond the mode numbering.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <utility>

namespace oracle {

using C = std::complex<double>;
using Wave = std::array<std::array<C, 4>, 4>;
using Mat = std::array<std::array<C, 4>, 4>;

// modes: 0 = 1H, 1 = 1V, 2 = 2H, 3 = 2V
enum : int { H1 = 0, V1 = 1, H2 = 2, V2 = 3 };

// sum_i c_i |a_i>|b_i> in slot notation (slot one = side 1, slot two = side 2),
// symmetrized and normalized.
inline Wave from_slots(std::initializer_list<std::tuple<C, int, int>> terms) {
  Wave w{};
  for (auto [c, a, b] : terms) {
    w[a][b] += c;
    w[b][a] += c;
  }
  double n = 0;
  for (auto& r : w)
    for (auto& v : r) n += std::norm(v);
  for (auto& r : w)
    for (auto& v : r) v /= std::sqrt(n);
  return w;
}

inline Wave evolve(const Wave& w, const Mat& u) {
  Wave out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) out[a][b] += u[a][c] * u[b][d] * w[c][d];
  return out;
}

// Unordered detector pair -> probability.
inline std::map<std::pair<int, int>, double> detector_probabilities(const Wave& w) {
  std::map<std::pair<int, int>, double> p;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p[{std::min(a, b), std::max(a, b)}] += std::norm(w[a][b]);
  return p;
}

inline Mat beam_splitter() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat m{};
  m[H1][H1] = r;  m[H2][H1] = r;  m[H1][H2] = r;  m[H2][H2] = -r;
  m[V1][V1] = r;  m[V2][V1] = r;  m[V1][V2] = r;  m[V2][V2] = -r;
  return m;
}

inline Mat hadamard_side2() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat m{};
  m[H1][H1] = 1;  m[V1][V1] = 1;
  m[H2][H2] = r;  m[V2][H2] = r;  m[H2][V2] = r;  m[V2][V2] = -r;
  return m;
}

// Mixed-basis class of a detector pair: 0 chi1, 1 chi2, 2 chi3, 3 chi4, -1 none.
inline int classify(int a, int b) {
  const bool side1a = a < 2, side1b = b < 2;
  const bool ha = a % 2 == 0, hb = b % 2 == 0;
  if (side1a != side1b) return ha != hb ? 0 : -1;
  if (a != b) return 1;
  return ha ? 2 : 3;
}

inline std::array<double, 4> symbol_probabilities(const Wave& w) {
  std::array<double, 4> out{};
  for (auto [ab, p] : detector_probabilities(evolve(w, beam_splitter()))) {
    const int k = classify(ab.first, ab.second);
    if (k >= 0) out[k] += p;
  }
  return out;
}

inline const Wave& chi(int i) {
  const double r = 1.0 / std::sqrt(2.0);
  static const std::array<Wave, 4> states = {
      from_slots({{r, H1, V2}, {-r, V1, H2}}),
      from_slots({{r, H1, V2}, {r, V1, H2}}),
      from_slots({{1.0, H1, H2}}),
      from_slots({{1.0, V1, V2}}),
  };
  return states[i];
}

}  // namespace oracle
