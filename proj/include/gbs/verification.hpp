#pragma once

// Built-in oracle and invariant battery run by `gbs verify`.

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gbs/fock_oracle.hpp"
#include "gbs/haar.hpp"
#include "gbs/observables.hpp"
#include "gbs/patterns.hpp"
#include "gbs/training.hpp"

namespace gbs {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// |a - b| <= rel * |b| + abs_floor
inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-14) {
  return std::abs(a - b) <= rel * std::abs(b) + abs_floor;
}

inline GaussianState squeezed_circuit(const std::vector<double>& r, const std::vector<double>& phi, const CMat& u) {
  const int n = static_cast<int>(r.size());
  std::vector<SymplecticMap> maps;
  for (int j = 0; j < n; ++j) maps.push_back(squeezer(j, r[j], phi[j], n));
  maps.push_back(interferometer_map(u));
  return apply(compose(maps), vacuum(n));
}

namespace detail {

inline CheckResult check_closed_forms() {
  double worst = 0.0, worst_odd = 0.0;
  for (double r : {0.3, 0.5, 0.88}) {
    const auto s = apply(squeezer(0, r, 0.7, 1), vacuum(1));
    const double t = std::tanh(r), c = std::cosh(r);
    worst = std::max(worst, std::abs(pattern_probability(s, PhotonPattern({0})) * c - 1.0));
    worst = std::max(worst, std::abs(pattern_probability(s, PhotonPattern({2})) / (t * t / (2 * c)) - 1.0));
    for (int odd : {1, 3, 5}) worst_odd = std::max(worst_odd, pattern_probability(s, PhotonPattern({odd})));
  }
  std::ostringstream os;
  os << "max rel err " << worst << ", max odd " << worst_odd;
  return {"single-mode closed forms Pr(0), Pr(2), odd", worst < 1e-8 && worst_odd < 1e-10, os.str()};
}

inline CheckResult check_mean_photon() {
  const double r = 0.88;
  const auto s = apply(squeezer(0, r, M_PI / 4, 1), vacuum(1));
  const double err = std::abs(mean_photon(s, 0) - std::sinh(r) * std::sinh(r));
  const double err_jet = std::abs(mean_photon_via_jet(s, 0) - mean_photon(s, 0));
  std::ostringstream os;
  os << "closed-form err " << err << ", jet err " << err_jet;
  return {"mean photon sinh^2(0.88)", err < 1e-9 && err_jet < 1e-10, os.str()};
}

inline CheckResult check_oracle_battery() {
  double worst = 0.0;
  int count = 0, failures = 0;
  for (int n : {1, 2, 3})
    for (double r : {0.3, 0.88})
      for (std::uint64_t seed : {11u, 12u, 13u}) {
        const std::vector<double> rs(n, r);
        std::vector<double> phis;
        for (int j = 0; j < n; ++j) phis.push_back(0.4 * j + 0.1 * static_cast<double>(seed));
        const CMat u = haar_unitary(n, seed);
        const auto state = squeezed_circuit(rs, phis, u);
        const FockCircuit circuit{rs, phis, u};
        for (int total = 0; total <= 4; ++total)
          for (const auto& p : enumerate_patterns(n, total, total)) {
            const double a = pattern_probability(state, p);
            const double b = fock_oracle_probability(circuit, p).probability;
            if (b > 1e-10) worst = std::max(worst, std::abs(a - b) / b);
            if (!close_rel(a, b, 1e-6)) ++failures;
            ++count;
          }
      }
  std::ostringstream os;
  os << count << " patterns, " << failures << " mismatches, worst rel err " << worst;
  return {"Fock oracle equivalence (n<=3, total<=4)", failures == 0, os.str()};
}

inline CheckResult check_normalization() {
  const auto state = squeezed_circuit({0.5, 0.5}, {0.0, 0.0}, haar_unitary(2, 1));
  double sum = 0.0;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) sum += pattern_probability(state, PhotonPattern({a, b}), 12);
  std::ostringstream os;
  os << "sum " << sum;
  return {"normalization n=2 r=0.5, counts<=6", std::abs(sum - 1.0) < 1e-3, os.str()};
}

inline CheckResult check_structural_sweep() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double symp = 0.0, purity = 0.0, uncert = 0.0, total = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<SymplecticMap> maps;
    for (int j = 0; j < n; ++j) maps.push_back(squeezer(j, unit(rng), 2 * M_PI * unit(rng), n));
    const auto mid = apply(compose(maps), vacuum(n));
    const auto passive = interferometer_map(haar_unitary(n, rng()));
    maps.push_back(passive);
    maps.push_back(squeezer(static_cast<int>(rng() % n), 0.5 * unit(rng), unit(rng), n));
    const auto composite = compose(maps);
    const auto out = apply(composite, vacuum(n));
    const double scale = std::max(1.0, max_abs(composite.mat()));
    symp = std::max(symp, symplectic_defect(composite.mat()) / (scale * scale));
    purity = std::max(purity, std::abs(out.cov().determinant() - 1.0));
    const CMat sigma = out.cov().cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(n).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> eig(sigma);
    uncert = std::max(uncert, -eig.eigenvalues().minCoeff());
    const auto mixed = apply(passive, mid);
    double before = 0.0, after = 0.0;
    for (int j = 0; j < n; ++j) {
      before += mean_photon(mid, j);
      after += mean_photon(mixed, j);
    }
    total = std::max(total, std::abs(before - after));
  }
  std::ostringstream os;
  os << "symplectic " << symp << ", purity " << purity << ", uncertainty " << uncert << ", photon total " << total;
  return {"structural invariants (100 random circuits)", symp < 1e-9 && purity < 1e-9 && uncert < 1e-9 && total < 1e-9,
          os.str()};
}

inline CheckResult check_gradients() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 0.3);
  double worst = 0.0;
  for (int n : {2, 4}) {
    auto spec = PipelineSpec::uniform(n, 0.6, 0.3, rng());
    for (int j = 0; j < n; ++j) spec.squeeze_r[j] = 0.3 + 0.1 * j;
    for (auto& p : spec.trainable.params()) p = normal(rng);
    const auto a = gradient_forward_jet(spec, LossKind::pair);
    const auto b = gradient_central_difference(spec, LossKind::pair, 1e-5);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - b[i]) * (a[i] - b[i]);
      den += a[i] * a[i];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  std::ostringstream os;
  os << "max relative difference " << worst;
  return {"forward_jet vs central_difference gradient", worst < 1e-4, os.str()};
}

inline CheckResult check_mean_loss_gradient() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 0.5);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    auto spec = PipelineSpec::uniform(4, 0.88, M_PI / 4, rng());
    for (auto& p : spec.trainable.params()) p = normal(rng);
    worst = std::max(worst, norm2(gradient_forward_jet(spec, LossKind::mean)));
  }
  std::ostringstream os;
  os << "max gradient norm " << worst;
  return {"mean-photon loss has zero gradient (identical squeezers)", worst < 1e-9, os.str()};
}

}  // namespace detail

inline std::vector<CheckResult> run_verification_battery() {
  const std::vector<std::function<CheckResult()>> checks = {
      detail::check_mean_photon,      detail::check_closed_forms, detail::check_oracle_battery,
      detail::check_normalization,    detail::check_structural_sweep, detail::check_gradients,
      detail::check_mean_loss_gradient};
  std::vector<CheckResult> out;
  for (const auto& check : checks) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"exception", false, e.what()});
    }
  }
  return out;
}

}  // namespace gbs
