#pragma once

// Truncated multivariate Taylor polynomials ("jets").
//
// A jet stores every coefficient of x_0^e_0 ... x_{v-1}^e_{v-1} with
// e_i <= caps_i in a dense row of length prod(caps_i + 1); the flat index is
// sum(e_i * stride_i) with stride_0 = 1. Products drop any monomial whose
// exponent exceeds a cap, so high-order mixed derivatives at the origin can
// be read off exactly from a small table.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "gbs/core.hpp"
#include "gbs/dual.hpp"

namespace gbs {

class DegreeCaps {
 public:
  /// Upper bound on the dense table length.
  static constexpr std::size_t kMaxSize = std::size_t{1} << 26;

  DegreeCaps() : DegreeCaps(std::vector<int>{}) {}

  explicit DegreeCaps(std::vector<int> caps) : caps_(std::move(caps)) {
    strides_.resize(caps_.size());
    size_ = 1;
    for (std::size_t i = 0; i < caps_.size(); ++i) {
      require(caps_[i] >= 0, "DegreeCaps: caps must be non-negative");
      strides_[i] = size_;
      size_ *= static_cast<std::size_t>(caps_[i]) + 1;
      require(size_ <= kMaxSize, "DegreeCaps: jet table too large");
    }
    auto table = std::make_shared<std::vector<int>>(size_ * caps_.size());
    std::vector<int> e(caps_.size(), 0);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      std::copy(e.begin(), e.end(), table->begin() + static_cast<std::ptrdiff_t>(flat * caps_.size()));
      for (std::size_t v = 0; v < caps_.size(); ++v) {
        if (++e[v] <= caps_[v]) break;
        e[v] = 0;
      }
    }
    table_ = std::move(table);
  }

  std::size_t n_vars() const { return caps_.size(); }
  int cap(std::size_t var) const { return caps_[var]; }
  const std::vector<int>& caps() const { return caps_; }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t var) const { return strides_[var]; }
  int total_degree() const { return std::accumulate(caps_.begin(), caps_.end(), 0); }

  bool contains(std::span<const int> exps) const {
    if (exps.size() != caps_.size()) return false;
    for (std::size_t v = 0; v < caps_.size(); ++v)
      if (exps[v] < 0 || exps[v] > caps_[v]) return false;
    return true;
  }

  std::size_t flat_index(std::span<const int> exps) const {
    require(contains(exps), "DegreeCaps: multi-index outside caps");
    std::size_t flat = 0;
    for (std::size_t v = 0; v < caps_.size(); ++v) flat += static_cast<std::size_t>(exps[v]) * strides_[v];
    return flat;
  }

  std::span<const int> exponents(std::size_t flat) const {
    return {table_->data() + flat * caps_.size(), caps_.size()};
  }

  bool operator==(const DegreeCaps& o) const { return caps_ == o.caps_; }

 private:
  std::vector<int> caps_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  std::shared_ptr<const std::vector<int>> table_;
};

template <typename T>
class JetPolynomial {
 public:
  explicit JetPolynomial(DegreeCaps caps, T constant = T(0))
      : caps_(std::move(caps)), coeffs_(caps_.size(), T(0)) {
    coeffs_[0] = constant;
  }

  /// The monomial x_var, or the zero jet when cap(var) = 0.
  static JetPolynomial variable(const DegreeCaps& caps, std::size_t var) {
    require(var < caps.n_vars(), "JetPolynomial::variable: index out of range");
    JetPolynomial p(caps);
    if (caps.cap(var) >= 1) p.coeffs_[caps.stride(var)] = T(1);
    return p;
  }

  const DegreeCaps& caps() const { return caps_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const T> coeffs() const { return coeffs_; }

  T& operator[](std::size_t flat) { return coeffs_[flat]; }
  const T& operator[](std::size_t flat) const { return coeffs_[flat]; }

  T coeff(std::span<const int> exps) const { return coeffs_[caps_.flat_index(exps)]; }
  T coeff(std::initializer_list<int> exps) const {
    return coeff(std::span<const int>(exps.begin(), exps.size()));
  }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!is_exact_zero(c)) return false;
    return true;
  }

  /// Drops every coefficient outside the smaller caps.
  JetPolynomial restrict_to(const DegreeCaps& smaller) const {
    require(smaller.n_vars() == caps_.n_vars(), "restrict_to: variable count mismatch");
    JetPolynomial out(smaller);
    for (std::size_t flat = 0; flat < smaller.size(); ++flat) {
      const auto e = smaller.exponents(flat);
      require(caps_.contains(e), "restrict_to: target caps exceed source caps");
      out.coeffs_[flat] = coeffs_[caps_.flat_index(e)];
    }
    return out;
  }

  JetPolynomial& operator+=(const JetPolynomial& o) {
    require(caps_ == o.caps_, "jet addition: caps mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  JetPolynomial& operator*=(const T& s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

 private:
  DegreeCaps caps_;
  std::vector<T> coeffs_;
};

/// Truncated product. Cost is size(a) * nonzeros(b), so pass the sparser
/// factor second.
template <typename T>
JetPolynomial<T> jet_multiply(const JetPolynomial<T>& a, const JetPolynomial<T>& b) {
  require(a.caps() == b.caps(), "jet_multiply: caps mismatch");
  const DegreeCaps& caps = a.caps();
  const std::size_t nv = caps.n_vars();
  JetPolynomial<T> out(caps);
  std::vector<int> limit(nv), e(nv);
  for (std::size_t jb = 0; jb < b.size(); ++jb) {
    if (is_exact_zero(b[jb])) continue;
    const auto eb = caps.exponents(jb);
    for (std::size_t v = 0; v < nv; ++v) limit[v] = caps.cap(v) - eb[v];
    // Walk the sub-rectangle e <= limit; flat(e + eb) = flat(e) + jb.
    std::fill(e.begin(), e.end(), 0);
    std::size_t ia = 0;
    while (true) {
      if (!is_exact_zero(a[ia])) out[ia + jb] += a[ia] * b[jb];
      std::size_t v = 0;
      for (; v < nv; ++v) {
        if (e[v] < limit[v]) {
          ++e[v];
          ia += caps.stride(v);
          break;
        }
        ia -= static_cast<std::size_t>(e[v]) * caps.stride(v);
        e[v] = 0;
      }
      if (v == nv) break;
    }
  }
  return out;
}

/// exp(k^T Q k / 2 + b^T k + c).
template <typename T>
struct QuadraticExponentForm {
  MatT<T> quad;
  VecT<T> lin;
  T constant{0};

  Eigen::Index n_vars() const { return lin.size(); }
};

/// Taylor coefficients of exp(form) at the origin, truncated to caps.
///
/// The exponent p(k) = k^T Q k / 2 + b^T k has no constant term, so p^m only
/// holds degrees >= m and the series sum p^m / m! terminates at
/// m = total_degree(caps).
template <typename T>
JetPolynomial<T> jet_from_quadratic(const QuadraticExponentForm<T>& form, const DegreeCaps& caps) {
  const auto nv = static_cast<Eigen::Index>(caps.n_vars());
  require(form.quad.rows() == nv && form.quad.cols() == nv && form.lin.size() == nv,
          "jet_from_quadratic: form dimension does not match caps");
  JetPolynomial<T> p(caps);
  std::vector<int> e(caps.n_vars(), 0);
  auto add_monomial = [&](const T& value) {
    if (caps.contains(e)) p[caps.flat_index(e)] += value;
  };
  for (Eigen::Index i = 0; i < nv; ++i) {
    e[i] = 1;
    add_monomial(form.lin(i));
    e[i] = 2;
    add_monomial(T(0.5) * form.quad(i, i));
    e[i] = 0;
    for (Eigen::Index j = i + 1; j < nv; ++j) {
      e[i] = 1;
      e[j] = 1;
      add_monomial(T(0.5) * (form.quad(i, j) + form.quad(j, i)));
      e[i] = 0;
      e[j] = 0;
    }
  }

  JetPolynomial<T> result(caps, T(1));
  JetPolynomial<T> term(caps, T(1));
  const int order = caps.total_degree();
  for (int m = 1; m <= order; ++m) {
    term = jet_multiply(term, p);
    term *= T(1.0 / m);
    if (term.is_zero()) break;
    result += term;
  }
  using std::exp;
  result *= exp(form.constant);
  return result;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

/// d^orders f(0) = coeff(orders) * prod(orders_i!)
template <typename T>
T extract_mixed_derivative(const JetPolynomial<T>& jet, std::span<const int> orders) {
  if (!jet.caps().contains(orders))
    throw std::invalid_argument("extract_mixed_derivative: orders exceed caps");
  double scale = 1.0;
  for (int o : orders) scale *= factorial(o);
  return jet.coeff(orders) * T(scale);
}

template <typename T>
T extract_mixed_derivative(const JetPolynomial<T>& jet, std::initializer_list<int> orders) {
  return extract_mixed_derivative(jet, std::span<const int>(orders.begin(), orders.size()));
}

/// (d^2/dx_a^2 + d^2/dx_b^2)^power
struct LaplacianFactor {
  int var_a;
  int var_b;
  int power;
};

/// Applies prod_f (d_a^2 + d_b^2)^power_f at the origin, expanding each factor
/// binomially into d_a^{2m} d_b^{2(power-m)}.
template <typename T>
T laplacian_power_derivative(const JetPolynomial<T>& jet, std::span<const LaplacianFactor> factors) {
  const DegreeCaps& caps = jet.caps();
  std::vector<int> need(caps.n_vars(), 0);
  for (const auto& f : factors) {
    require(f.power >= 0, "laplacian_power_derivative: negative power");
    require(f.var_a >= 0 && static_cast<std::size_t>(f.var_a) < caps.n_vars() && f.var_b >= 0 &&
                static_cast<std::size_t>(f.var_b) < caps.n_vars() && f.var_a != f.var_b,
            "laplacian_power_derivative: bad variable index");
    need[f.var_a] += 2 * f.power;
    need[f.var_b] += 2 * f.power;
  }
  for (std::size_t v = 0; v < caps.n_vars(); ++v)
    if (need[v] > caps.cap(v)) throw std::invalid_argument("laplacian_power_derivative: caps exceeded");

  std::vector<int> orders(caps.n_vars(), 0);
  T total(0);
  auto recurse = [&](auto&& self, std::size_t f, double weight) -> void {
    if (f == factors.size()) {
      total += T(weight) * extract_mixed_derivative(jet, std::span<const int>(orders));
      return;
    }
    const auto& fac = factors[f];
    for (int m = 0; m <= fac.power; ++m) {
      orders[fac.var_a] += 2 * m;
      orders[fac.var_b] += 2 * (fac.power - m);
      self(self, f + 1, weight * binomial(fac.power, m));
      orders[fac.var_a] -= 2 * m;
      orders[fac.var_b] -= 2 * (fac.power - m);
    }
  };
  recurse(recurse, 0, 1.0);
  return total;
}

template <typename T>
T laplacian_power_derivative(const JetPolynomial<T>& jet, std::initializer_list<LaplacianFactor> factors) {
  return laplacian_power_derivative(jet, std::span<const LaplacianFactor>(factors.begin(), factors.size()));
}

}  // namespace gbs
