#pragma once

// Photon-number observables as derivatives of the characteristic function.
//
//   <n_j>             = -1/2 (lap_j + 1) chi |_0
//   <(n_j - n_k)^2>   = [1/4 (lap_j - lap_k)^2 - 1/2] chi |_0
//
// chi(x) = exp(-x g x / 4 + i x d) is complex, but the operators above are
// even and homogeneous. Substituting x = i y gives the real function
// G(y) = exp(y (g/2) y / 2 - d y), and a derivative of order 2L obeys
// D chi(0) = (-1)^L D G(0). The jet engine works on G.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/jet.hpp"

namespace gbs {

/// Real form G restricted to the listed quadrature indices (others set to 0).
template <typename T>
QuadraticExponentForm<T> chi_real_form(const MatT<T>& cov, const VecT<T>& disp, std::span<const int> vars) {
  const auto n = static_cast<Eigen::Index>(vars.size());
  QuadraticExponentForm<T> form{MatT<T>(n, n), VecT<T>(n), T(0)};
  for (Eigen::Index a = 0; a < n; ++a) {
    form.lin(a) = -disp(vars[a]);
    for (Eigen::Index b = 0; b < n; ++b) form.quad(a, b) = T(0.5) * cov(vars[a], vars[b]);
  }
  return form;
}

template <typename T>
T mean_photon_closed_form(const MatT<T>& cov, const VecT<T>& disp, int j) {
  const int q = 2 * j, p = 2 * j + 1;
  return T(0.25) * (cov(q, q) + cov(p, p)) + T(0.5) * (disp(q) * disp(q) + disp(p) * disp(p)) - T(0.5);
}

template <typename T>
T mean_photon_jet(const MatT<T>& cov, const VecT<T>& disp, int j) {
  const int vars[] = {2 * j, 2 * j + 1};
  const auto jet = jet_from_quadratic(chi_real_form(cov, disp, vars), DegreeCaps({2, 2}));
  // lap chi = -lap G for a second-order operator.
  return T(0.5) * laplacian_power_derivative(jet, {{0, 1, 1}}) - T(0.5);
}

/// Unclipped <(n_j - n_k)^2>.
///
/// (lap_j - lap_k)^2 = lap_j^2 + lap_k^2 - 2 lap_j lap_k. The squared
/// Laplacians need order 4 in one mode's pair of variables; the cross term
/// needs order 2 in all four, so each term gets its own small jet.
template <typename T>
T diff_photon_sq_raw(const MatT<T>& cov, const VecT<T>& disp, int j, int k) {
  const int vj[] = {2 * j, 2 * j + 1};
  const int vk[] = {2 * k, 2 * k + 1};
  const int vjk[] = {2 * j, 2 * j + 1, 2 * k, 2 * k + 1};
  const DegreeCaps single({4, 4});
  const auto jet_j = jet_from_quadratic(chi_real_form(cov, disp, vj), single);
  const auto jet_k = jet_from_quadratic(chi_real_form(cov, disp, vk), single);
  const auto jet_jk = jet_from_quadratic(chi_real_form(cov, disp, vjk), DegreeCaps({2, 2, 2, 2}));
  const T lap2_j = laplacian_power_derivative(jet_j, {{0, 1, 2}});
  const T lap2_k = laplacian_power_derivative(jet_k, {{0, 1, 2}});
  const T cross = laplacian_power_derivative(jet_jk, {{0, 1, 1}, {2, 3, 1}});
  // Fourth-order terms carry (-1)^2 = +1.
  return T(0.25) * (lap2_j + lap2_k - T(2) * cross) - T(0.5);
}

inline void check_mode(const GaussianState& s, int j, const char* who) {
  if (j < 0 || j >= s.n_modes()) throw std::invalid_argument(std::string(who) + ": mode index out of range");
}

inline double mean_photon(const GaussianState& state, int j) {
  check_mode(state, j, "mean_photon");
  return mean_photon_closed_form<double>(state.cov(), state.disp(), j);
}

/// Same quantity as mean_photon, evaluated by differentiating G.
inline double mean_photon_via_jet(const GaussianState& state, int j) {
  check_mode(state, j, "mean_photon_via_jet");
  return mean_photon_jet<double>(state.cov(), state.disp(), j);
}

/// Clipping tolerance for round-off below zero.
inline constexpr double kNegativeTolerance = 1e-9;

struct DiffPhotonResult {
  double value;
  bool clipped;  // a value in [-1e-9, 0) was reported as 0
};

inline DiffPhotonResult diff_photon_sq_checked(const GaussianState& state, int j, int k) {
  check_mode(state, j, "diff_photon_sq");
  check_mode(state, k, "diff_photon_sq");
  require(j != k, "diff_photon_sq: modes must differ");
  // Evaluate with (min, max) so the result is symmetric in (j, k) bit for bit.
  const double v = diff_photon_sq_raw<double>(state.cov(), state.disp(), std::min(j, k), std::max(j, k));
  if (!std::isfinite(v)) throw NumericalError("diff_photon_sq: non-finite result");
  if (v < -kNegativeTolerance) throw NumericalError("diff_photon_sq: negative second moment (broken state)");
  if (v < 0.0) return {0.0, true};
  return {v, false};
}

inline double diff_photon_sq(const GaussianState& state, int j, int k) {
  return diff_photon_sq_checked(state, j, k).value;
}

/// exp(<(n_0 - n_1)^2>)
inline double loss_pair(const GaussianState& state) {
  require(state.n_modes() >= 2, "loss_pair: needs at least 2 modes");
  return std::exp(diff_photon_sq(state, 0, 1));
}

/// exp((<n_0> - <n_1>)^2)
inline double loss_mean(const GaussianState& state) {
  require(state.n_modes() >= 2, "loss_mean: needs at least 2 modes");
  const double d = mean_photon(state, 0) - mean_photon(state, 1);
  return std::exp(d * d);
}

struct ObservableReport {
  std::vector<double> per_mode_mean;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> pairwise_diff_sq;
  std::vector<bool> clipped;
  double total_mean = 0.0;
};

inline ObservableReport observe(const GaussianState& state, std::span<const std::pair<int, int>> pairs) {
  ObservableReport rep;
  for (int j = 0; j < state.n_modes(); ++j) {
    rep.per_mode_mean.push_back(mean_photon(state, j));
    rep.total_mean += rep.per_mode_mean.back();
  }
  for (const auto& [j, k] : pairs) {
    const auto r = diff_photon_sq_checked(state, j, k);
    rep.pairs.emplace_back(j, k);
    rep.pairwise_diff_sq.push_back(r.value);
    rep.clipped.push_back(r.clipped);
  }
  return rep;
}

}  // namespace gbs
