#pragma once

// Photon-pattern probabilities from the Husimi Gaussian.
//
// With A = (g + 1)/2 the pattern probability is
//
//   Pr(n) = 1 / (n! 2^{n_T}) * prod_j lap_j^{n_j} Q(k) |_{k=0},
//   Q(k)  = det(A)^{-1/2} exp(k^2/2 - (k - d)^T A^{-1} (k - d) / 2),
//
// where lap_j acts on (k_{2j}, k_{2j+1}). Q is the exponential of a quadratic
// form, so lap powers are read off a jet with cap 2 n_j on both variables of
// mode j.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/jet.hpp"

namespace gbs {

class PhotonPattern {
 public:
  explicit PhotonPattern(std::vector<int> counts) : counts_(std::move(counts)) {
    require(!counts_.empty(), "PhotonPattern: empty pattern");
    for (int c : counts_) require(c >= 0, "PhotonPattern: counts must be non-negative");
  }

  /// Parses "110000" or, for counts above 9, "1,10,0".
  static PhotonPattern parse(const std::string& text) {
    std::vector<int> counts;
    if (text.find(',') != std::string::npos) {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) counts.push_back(std::stoi(item));
    } else {
      for (char ch : text) {
        require(ch >= '0' && ch <= '9', "PhotonPattern: bad digit in '" + text + "'");
        counts.push_back(ch - '0');
      }
    }
    return PhotonPattern(std::move(counts));
  }

  const std::vector<int>& counts() const { return counts_; }
  int n_modes() const { return static_cast<int>(counts_.size()); }
  int operator[](int j) const { return counts_[j]; }
  int total() const {
    int t = 0;
    for (int c : counts_) t += c;
    return t;
  }
  bool is_binary() const {
    return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c <= 1; });
  }

  /// Digit string when every count is a single digit, comma list otherwise.
  std::string to_string() const {
    const bool digits = std::all_of(counts_.begin(), counts_.end(), [](int c) { return c <= 9; });
    std::string s;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (digits) {
        s += static_cast<char>('0' + counts_[i]);
      } else {
        if (i) s += ',';
        s += std::to_string(counts_[i]);
      }
    }
    return s;
  }

  auto operator<=>(const PhotonPattern&) const = default;

 private:
  std::vector<int> counts_;
};

struct HusimiForm {
  Mat A;
  Mat A_inv;
  double det_A;
  Vec disp;
  double prefactor;  // det(A)^{-1/2}
};

inline HusimiForm husimi_form(const GaussianState& state) {
  const int n = state.dim();
  Mat a = 0.5 * (state.cov() + Mat::Identity(n, n));
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("husimi_form: A is not positive definite");
  Mat a_inv = llt.solve(Mat::Identity(n, n));
  a_inv = 0.5 * (a_inv + a_inv.transpose()).eval();
  const Mat& l = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  return {std::move(a), std::move(a_inv), std::exp(log_det), state.disp(), std::exp(-0.5 * log_det)};
}

/// Patterns with more photons than this are rejected by default.
inline constexpr int kDefaultMaxTotal = 8;

/// Pr(pattern) before clipping to [0, 1].
inline double pattern_probability_unclipped(const GaussianState& state, const PhotonPattern& pattern,
                                            int max_total = kDefaultMaxTotal) {
  require(pattern.n_modes() == state.n_modes(), "pattern_probability: pattern length does not match state");
  if (pattern.total() > max_total)
    throw std::invalid_argument("pattern_probability: pattern total " + std::to_string(pattern.total()) +
                                " exceeds the configured maximum " + std::to_string(max_total));
  const HusimiForm h = husimi_form(state);

  // Only quadratures of occupied modes carry derivatives; the others are set
  // to zero, which leaves the needed coefficients unchanged.
  std::vector<int> vars, caps;
  std::vector<LaplacianFactor> factors;
  for (int j = 0; j < pattern.n_modes(); ++j) {
    if (pattern[j] == 0) continue;
    const int a = static_cast<int>(vars.size());
    vars.insert(vars.end(), {2 * j, 2 * j + 1});
    caps.insert(caps.end(), {2 * pattern[j], 2 * pattern[j]});
    factors.push_back({a, a + 1, pattern[j]});
  }

  const auto nv = static_cast<Eigen::Index>(vars.size());
  const Vec ad = h.A_inv * h.disp;
  QuadraticExponentForm<double> form{Mat(nv, nv), Vec(nv), -0.5 * h.disp.dot(ad)};
  for (Eigen::Index a = 0; a < nv; ++a) {
    form.lin(a) = ad(vars[a]);
    for (Eigen::Index b = 0; b < nv; ++b)
      form.quad(a, b) = (a == b ? 1.0 : 0.0) - h.A_inv(vars[a], vars[b]);
  }
  const auto jet = jet_from_quadratic(form, DegreeCaps(caps));
  const double deriv = factors.empty() ? jet[0] : laplacian_power_derivative(jet, std::span<const LaplacianFactor>(factors));

  double norm = std::ldexp(1.0, -pattern.total());
  for (int c : pattern.counts()) norm /= factorial(c);
  const double p = h.prefactor * deriv * norm;
  if (!std::isfinite(p)) throw NumericalError("pattern_probability: non-finite result");
  return p;
}

inline double pattern_probability(const GaussianState& state, const PhotonPattern& pattern,
                                  int max_total = kDefaultMaxTotal) {
  const double p = pattern_probability_unclipped(state, pattern, max_total);
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw NumericalError("pattern_probability: result " + std::to_string(p) + " outside [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

/// All patterns with the given total and per-mode bound, ascending
/// lexicographic order of the count vector.
inline std::vector<PhotonPattern> enumerate_patterns(int n_modes, int total, int max_per_mode) {
  require(n_modes >= 1, "enumerate_patterns: n_modes must be >= 1");
  require(total >= 0 && max_per_mode >= 0, "enumerate_patterns: negative arguments");
  if (static_cast<long>(n_modes) * max_per_mode < total)
    throw std::invalid_argument("enumerate_patterns: total exceeds n_modes * max_per_mode");
  std::vector<PhotonPattern> out;
  std::vector<int> counts(n_modes, 0);
  auto rec = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == n_modes) {
      if (remaining == 0) out.emplace_back(counts);
      return;
    }
    const int room = (n_modes - mode - 1) * max_per_mode;
    for (int c = std::max(0, remaining - room); c <= std::min(max_per_mode, remaining); ++c) {
      counts[mode] = c;
      self(self, mode + 1, remaining - c);
    }
    counts[mode] = 0;
  };
  rec(rec, 0, total);
  return out;
}

struct PatternDistribution {
  struct Entry {
    PhotonPattern pattern;
    double probability;
  };
  std::vector<Entry> entries;
  int total_photons = 0;
  std::optional<std::uint64_t> circuit_seed;

  double sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.probability;
    return s;
  }
  std::optional<double> find(const PhotonPattern& p) const {
    for (const auto& e : entries)
      if (e.pattern == p) return e.probability;
    return std::nullopt;
  }
};

/// Probabilities of every pattern with the given total and at most
/// max_per_mode photons per mode (binary patterns by default).
inline PatternDistribution distribution(const GaussianState& state, int total_photons,
                                        std::optional<std::uint64_t> circuit_seed = std::nullopt,
                                        int max_per_mode = 1, int max_total = kDefaultMaxTotal) {
  PatternDistribution d;
  d.total_photons = total_photons;
  d.circuit_seed = circuit_seed;
  for (auto& p : enumerate_patterns(state.n_modes(), total_photons, max_per_mode)) {
    const double prob = pattern_probability(state, p, max_total);
    d.entries.push_back({std::move(p), prob});
  }
  return d;
}

/// Twelve significant digits, fixed exponent form.
inline std::string format_probability(double p) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(11) << p;
  return os.str();
}

/// '#'-prefixed header lines, then "<pattern> <probability>" sorted by
/// pattern string.
inline void write_distribution(std::ostream& os, const PatternDistribution& d,
                               const std::vector<std::string>& header = {}) {
  for (const auto& h : header) os << "# " << h << '\n';
  os << "# total_photons = " << d.total_photons << '\n';
  if (d.circuit_seed) os << "# circuit_seed = " << *d.circuit_seed << '\n';
  os << "# records = " << d.entries.size() << '\n';
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& e : d.entries) rows.emplace_back(e.pattern.to_string(), e.probability);
  std::sort(rows.begin(), rows.end());
  for (const auto& [pat, p] : rows) os << pat << ' ' << format_probability(p) << '\n';
}

/// Reads the records written by write_distribution; header lines are skipped.
inline std::vector<PatternDistribution::Entry> read_distribution_records(std::istream& is) {
  std::vector<PatternDistribution::Entry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string pat;
    double p = 0.0;
    if (!(ls >> pat >> p)) throw std::invalid_argument("read_distribution_records: malformed line '" + line + "'");
    out.push_back({PhotonPattern::parse(pat), p});
  }
  return out;
}

}  // namespace gbs
