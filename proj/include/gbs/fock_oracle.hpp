#pragma once

// Brute-force pattern probabilities in a truncated photon-number basis.
//
// Independent of the phase-space path: each input mode is a squeezed vacuum
// S(r e^{i phi})|0> expanded by its two-term recursion, and the interferometer
// maps a_i^dag -> sum_j U_ji a_j^dag. Because passive optics conserves photon
// number, an output pattern of total T only receives amplitude from input
// number states of total T:
//
//   <m|U|n> = perm(U[m, n]) / sqrt(prod m! prod n!)
//
// where U[m, n] repeats row j m_j times and column i n_i times.

#include <cmath>
#include <optional>
#include <vector>

#include "gbs/core.hpp"
#include "gbs/jet.hpp"
#include "gbs/patterns.hpp"

namespace gbs {

struct FockCircuit {
  std::vector<double> squeeze_r;
  std::vector<double> squeeze_phi;
  CMat unitary;  // applied after the squeezers

  int n_modes() const { return static_cast<int>(squeeze_r.size()); }
};

struct FockOracleResult {
  double probability;
  double lost_norm;  // 1 - norm of the truncated product input state
  int cutoff;
};

inline constexpr double kFockMaxLostNorm = 1e-4;
inline constexpr int kFockDefaultCutoff = 10;

/// Number-basis amplitudes of S(r e^{i phi})|0> for n < cutoff.
inline std::vector<Complex> squeezed_vacuum_amplitudes(double r, double phi, int cutoff) {
  std::vector<Complex> c(cutoff, Complex(0.0));
  c[0] = 1.0 / std::sqrt(std::cosh(r));
  const Complex ratio = -std::polar(std::tanh(r), phi);
  for (int n = 2; n < cutoff; n += 2) c[n] = ratio * std::sqrt((n - 1.0) / n) * c[n - 2];
  return c;
}

/// Ryser's formula with Gray-code column updates.
inline Complex permanent(const CMat& w) {
  const int n = static_cast<int>(w.rows());
  if (n == 0) return 1.0;
  std::vector<Complex> row_sums(n, 0.0);
  Complex total = 0.0;
  const unsigned long subsets = 1ul << n;
  unsigned long gray_prev = 0;
  for (unsigned long k = 1; k < subsets; ++k) {
    const unsigned long gray = k ^ (k >> 1);
    const unsigned long flipped = gray ^ gray_prev;
    const int col = __builtin_ctzl(flipped);
    const double sign = (gray & flipped) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) row_sums[i] += sign * w(i, col);
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    total += (__builtin_popcountl(gray) % 2 == n % 2 ? 1.0 : -1.0) * prod;
    gray_prev = gray;
  }
  return total;
}

inline double fock_lost_norm(const FockCircuit& circuit, int cutoff) {
  double kept = 1.0;
  for (int i = 0; i < circuit.n_modes(); ++i) {
    double s = 0.0;
    for (const auto& a : squeezed_vacuum_amplitudes(circuit.squeeze_r[i], circuit.squeeze_phi[i], cutoff))
      s += std::norm(a);
    kept *= s;
  }
  return std::max(0.0, 1.0 - kept);
}

/// With no explicit cutoff, the smallest even cutoff >= max(10, 2 max + 4)
/// whose lost norm is below 1e-4 is used.
inline FockOracleResult fock_oracle_probability(const FockCircuit& circuit, const PhotonPattern& pattern,
                                                std::optional<int> cutoff = std::nullopt) {
  const int n = circuit.n_modes();
  require(n >= 1 && static_cast<int>(circuit.squeeze_phi.size()) == n, "fock_oracle: squeeze vector lengths differ");
  require(circuit.unitary.rows() == n && circuit.unitary.cols() == n, "fock_oracle: unitary has wrong size");
  require(pattern.n_modes() == n, "fock_oracle: pattern length mismatch");
  if (unitarity_defect(circuit.unitary) >= 1e-10) throw std::invalid_argument("fock_oracle: unitary is not unitary");

  int max_count = 0;
  for (int c : pattern.counts()) max_count = std::max(max_count, c);
  const int min_cutoff = 2 * max_count + 4;
  int cut = 0;
  double lost = 0.0;
  if (cutoff) {
    require(*cutoff >= min_cutoff, "fock_oracle: cutoff must be >= 2 * max count + 4");
    cut = *cutoff;
    lost = fock_lost_norm(circuit, cut);
    if (lost >= kFockMaxLostNorm) throw NumericalError("fock_oracle: cutoff too small, lost norm " + std::to_string(lost));
  } else {
    cut = std::max(kFockDefaultCutoff, min_cutoff);
    while ((lost = fock_lost_norm(circuit, cut)) >= kFockMaxLostNorm) {
      cut += 2;
      if (cut > 400) throw NumericalError("fock_oracle: no cutoff up to 400 reaches the norm threshold");
    }
  }

  const int total = pattern.total();
  std::vector<std::vector<Complex>> amps;
  for (int i = 0; i < n; ++i) amps.push_back(squeezed_vacuum_amplitudes(circuit.squeeze_r[i], circuit.squeeze_phi[i], cut));

  std::vector<int> out_rows;
  double out_fact = 1.0;
  for (int j = 0; j < n; ++j) {
    out_fact *= factorial(pattern[j]);
    for (int c = 0; c < pattern[j]; ++c) out_rows.push_back(j);
  }

  Complex amplitude = 0.0;
  std::vector<int> in(n, 0);
  auto rec = [&](auto&& self, int mode, int remaining, Complex weight) -> void {
    if (mode == n) {
      if (remaining != 0) return;
      std::vector<int> in_cols;
      double in_fact = 1.0;
      for (int i = 0; i < n; ++i) {
        in_fact *= factorial(in[i]);
        for (int c = 0; c < in[i]; ++c) in_cols.push_back(i);
      }
      CMat w(total, total);
      for (int a = 0; a < total; ++a)
        for (int b = 0; b < total; ++b) w(a, b) = circuit.unitary(out_rows[a], in_cols[b]);
      amplitude += weight * permanent(w) / std::sqrt(in_fact * out_fact);
      return;
    }
    for (int k = 0; k <= std::min(remaining, cut - 1); ++k) {
      const Complex c = amps[mode][k];
      if (c == Complex(0.0)) continue;
      in[mode] = k;
      self(self, mode + 1, remaining - k, weight * c);
    }
    in[mode] = 0;
  };
  rec(rec, 0, total, Complex(1.0));
  return {std::norm(amplitude), lost, cut};
}

}  // namespace gbs
