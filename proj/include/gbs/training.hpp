#pragma once

// Trainable interferometer and the gradient-descent loop.
//
// Physical order of the pipeline: vacuum -> per-mode squeezers -> trainable
// unitary exp(iH(theta)) -> Haar unitary. Only theta is trained.

#include <cmath>
#include <iomanip>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gbs/dual.hpp"
#include "gbs/gaussian.hpp"
#include "gbs/haar.hpp"
#include "gbs/observables.hpp"

namespace gbs {

/// Hermitian basis element for parameter `index` of an n-mode generator.
///
/// Layout: params[0..n) are the diagonal; then, for each pair i < j in
/// row-major order, a (real, imaginary) pair with H_ij = re + i im.
inline CMat generator_basis(int n, int index) {
  require(index >= 0 && index < n * n, "generator_basis: index out of range");
  CMat e = CMat::Zero(n, n);
  if (index < n) {
    e(index, index) = 1.0;
    return e;
  }
  int k = (index - n) / 2;
  const bool imag = (index - n) % 2 == 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, --k)
      if (k == 0) {
        e(i, j) = imag ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
        e(j, i) = std::conj(e(i, j));
        return e;
      }
  return e;
}

inline CMat hermitian_generator(int n, std::span<const double> params) {
  require(static_cast<int>(params.size()) == n * n, "hermitian_generator: need n^2 parameters");
  CMat h = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = params[i];
  std::size_t p = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, p += 2) {
      h(i, j) = Complex(params[p], params[p + 1]);
      h(j, i) = std::conj(h(i, j));
    }
  return h;
}

/// exp(iH) through the eigendecomposition H = V diag(lambda) V^dag, with its
/// exact directional derivative (Daleckii-Krein):
///   d exp(iH)[E] = V (G o D) V^dag,  G = V^dag E V,
///   D_ab = (e^{i l_a} - e^{i l_b}) / (l_a - l_b) = i e^{i m} sinc(delta / 2).
class HermitianExponential {
 public:
  explicit HermitianExponential(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(h);
    if (eig.info() != Eigen::Success) throw NumericalError("HermitianExponential: eigendecomposition failed");
    v_ = eig.eigenvectors();
    lambda_ = eig.eigenvalues();
    const auto n = lambda_.size();
    CVec phases(n);
    for (Eigen::Index a = 0; a < n; ++a) phases(a) = std::polar(1.0, lambda_(a));
    u_ = v_ * phases.asDiagonal() * v_.adjoint();
    d_.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) {
        const double half = 0.5 * (lambda_(a) - lambda_(b));
        const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
        d_(a, b) = Complex(0.0, sinc) * std::polar(1.0, 0.5 * (lambda_(a) + lambda_(b)));
      }
  }

  const CMat& unitary() const { return u_; }

  CMat derivative(const CMat& direction) const {
    const CMat g = v_.adjoint() * direction * v_;
    return v_ * g.cwiseProduct(d_) * v_.adjoint();
  }

 private:
  CMat v_;
  Vec lambda_;
  CMat u_;
  CMat d_;
};

class TrainableInterferometer {
 public:
  explicit TrainableInterferometer(int n) : n_(n), params_(static_cast<std::size_t>(n) * n, 0.0) {
    require(n >= 1, "TrainableInterferometer: n must be >= 1");
  }
  TrainableInterferometer(int n, std::vector<double> params) : n_(n), params_(std::move(params)) {
    require(n >= 1, "TrainableInterferometer: n must be >= 1");
    require(static_cast<int>(params_.size()) == n * n, "TrainableInterferometer: need n^2 parameters");
  }

  int n() const { return n_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& params() { return params_; }

  CMat generator() const { return hermitian_generator(n_, params_); }
  CMat unitary() const { return HermitianExponential(generator()).unitary(); }

 private:
  int n_;
  std::vector<double> params_;
};

struct PipelineSpec {
  int n = 0;
  std::vector<double> squeeze_r;
  std::vector<double> squeeze_phi;
  std::uint64_t haar_seed = 0;
  TrainableInterferometer trainable{1};
  /// Replaces the seeded Haar unitary when set.
  std::optional<CMat> haar_override;

  static PipelineSpec uniform(int n, double r, double phi, std::uint64_t haar_seed) {
    return {n, std::vector<double>(n, r), std::vector<double>(n, phi), haar_seed, TrainableInterferometer(n), {}};
  }

  void validate() const {
    require(n >= 1, "PipelineSpec: n must be >= 1");
    require(static_cast<int>(squeeze_r.size()) == n && static_cast<int>(squeeze_phi.size()) == n,
            "PipelineSpec: squeeze vectors must have length n");
    for (double r : squeeze_r) require(r >= 0.0, "PipelineSpec: squeeze_r must be non-negative");
    require(trainable.n() == n, "PipelineSpec: trainable interferometer has wrong size");
    if (haar_override) require(haar_override->rows() == n && haar_override->cols() == n, "PipelineSpec: bad Haar override");
  }

  CMat haar() const { return haar_override ? *haar_override : haar_unitary(n, haar_seed); }

  bool identical_squeezers() const {
    for (int j = 1; j < n; ++j)
      if (squeeze_r[j] != squeeze_r[0] || squeeze_phi[j] != squeeze_phi[0]) return false;
    return true;
  }
};

inline SymplecticMap squeezing_layer(const PipelineSpec& spec) {
  std::vector<SymplecticMap> maps;
  for (int j = 0; j < spec.n; ++j) maps.push_back(squeezer(j, spec.squeeze_r[j], spec.squeeze_phi[j], spec.n));
  return compose(maps);
}

inline GaussianState build_pipeline(const PipelineSpec& spec) {
  spec.validate();
  const SymplecticMap layers[] = {squeezing_layer(spec), interferometer_map(spec.trainable.unitary()),
                                  interferometer_map(spec.haar())};
  return apply(compose(layers), vacuum(spec.n));
}

enum class GradMethod { forward_jet, central_difference };
enum class LossKind { pair, mean };

inline std::string to_string(GradMethod m) {
  return m == GradMethod::forward_jet ? "forward_jet" : "central_difference";
}
inline GradMethod parse_grad_method(const std::string& s) {
  if (s == "forward_jet") return GradMethod::forward_jet;
  if (s == "central_difference") return GradMethod::central_difference;
  throw std::invalid_argument("unknown grad method '" + s + "'");
}
inline std::string to_string(LossKind k) { return k == LossKind::pair ? "pair" : "mean"; }

struct TrainingConfig {
  double learning_rate = 0.01;
  int max_epochs = 20000;
  double target_diff = 0.05;
  GradMethod grad_method = GradMethod::forward_jet;
  double fd_step = 1e-5;
  std::uint64_t seed = 0;
  int log_every = 50;
  LossKind loss = LossKind::pair;

  void validate() const {
    require(learning_rate > 0.0, "TrainingConfig: learning_rate must be > 0");
    require(max_epochs >= 1, "TrainingConfig: max_epochs must be >= 1");
    require(target_diff >= 0.0, "TrainingConfig: target_diff must be >= 0");
    require(fd_step > 0.0 && fd_step <= 1e-2, "TrainingConfig: fd_step must be in (0, 1e-2]");
    require(log_every >= 1, "TrainingConfig: log_every must be >= 1");
  }
};

inline double loss_value(const GaussianState& state, LossKind kind) {
  return kind == LossKind::pair ? loss_pair(state) : loss_mean(state);
}

namespace detail {

/// Loss from the rows of the total passive map that feed modes 0 and 1.
/// The squeezed input has zero displacement, and so does the output.
template <typename T>
T loss_from_rows(const MatT<T>& rows, const MatT<T>& squeezed_cov, LossKind kind) {
  const MatT<T> sub = rows * squeezed_cov * rows.transpose();
  const VecT<T> zero = VecT<T>::Constant(4, T(0));
  using std::exp;
  if (kind == LossKind::pair) return exp(diff_photon_sq_raw<T>(sub, zero, 0, 1));
  const T d = mean_photon_closed_form<T>(sub, zero, 0) - mean_photon_closed_form<T>(sub, zero, 1);
  return exp(d * d);
}

inline Mat squeezed_covariance(const PipelineSpec& spec) {
  return apply(squeezing_layer(spec), vacuum(spec.n)).cov();
}

}  // namespace detail

/// Exact forward-mode gradient: one dual pass per parameter, seeded with the
/// tangent of exp(iH) along that parameter's generator direction.
inline std::vector<double> gradient_forward_jet(const PipelineSpec& spec, LossKind kind) {
  spec.validate();
  const int n = spec.n;
  using D = Dual<double>;
  const Mat cov0 = detail::squeezed_covariance(spec);
  const MatT<D> cov0_d = cov0.cast<D>();
  const CMat haar = spec.haar();
  const HermitianExponential expo(spec.trainable.generator());
  const Mat o = passive_embedding(haar * expo.unitary());
  const Mat rows_val = o.topRows(4);

  std::vector<double> grad(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n * n; ++p) {
    const Mat rows_tan = passive_embedding(haar * expo.derivative(generator_basis(n, p))).topRows(4);
    MatT<D> rows(4, 2 * n);
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = D(rows_val(i, j), rows_tan(i, j));
    grad[p] = detail::loss_from_rows<D>(rows, cov0_d, kind).eps;
  }
  return grad;
}

inline std::vector<double> gradient_central_difference(const PipelineSpec& spec, LossKind kind, double h) {
  spec.validate();
  std::vector<double> grad(spec.trainable.params().size());
  PipelineSpec probe = spec;
  probe.haar_override = spec.haar();
  for (std::size_t p = 0; p < grad.size(); ++p) {
    const double base = spec.trainable.params()[p];
    probe.trainable.params()[p] = base + h;
    const double up = loss_value(build_pipeline(probe), kind);
    probe.trainable.params()[p] = base - h;
    const double down = loss_value(build_pipeline(probe), kind);
    probe.trainable.params()[p] = base;
    grad[p] = (up - down) / (2.0 * h);
  }
  return grad;
}

struct LossAndGrad {
  double loss;
  std::vector<double> grad;
};

inline LossAndGrad loss_and_grad(const PipelineSpec& spec, const TrainingConfig& config) {
  require(spec.n >= 2, "loss_and_grad: needs at least 2 modes");
  config.validate();
  const double loss = loss_value(build_pipeline(spec), config.loss);
  if (!std::isfinite(loss)) throw NumericalError("loss_and_grad: non-finite loss");
  auto grad = config.grad_method == GradMethod::forward_jet
                  ? gradient_forward_jet(spec, config.loss)
                  : gradient_central_difference(spec, config.loss, config.fd_step);
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericalError("loss_and_grad: non-finite gradient");
  return {loss, std::move(grad)};
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct TrainingRecord {
  int epoch;
  double loss;
  double mean_n0;
  double mean_n1;
  double diff_sq_01;
  double grad_norm;
};

struct TrainingTrace {
  std::vector<TrainingRecord> records;   // logged epochs
  std::vector<double> loss_history;      // every evaluated epoch
  std::vector<double> final_params;
  std::vector<double> initial_means;
  double max_mean_drift = 0.0;           // max over epochs and modes of |<n_j> - initial|
  double max_unitarity_defect = 0.0;     // max over epochs of |U U^dag - 1|
  int updates = 0;
  bool reached_target = false;
};

/// Plain gradient descent on the trainable parameters.
///
/// Epoch e evaluates the loss at the current parameters, logs it when
/// e % log_every == 0 or when the run stops, then updates. The run stops once
/// <(n_0 - n_1)^2> < target_diff or after max_epochs updates.
inline TrainingTrace train(const PipelineSpec& spec, const TrainingConfig& config) {
  spec.validate();
  config.validate();
  require(spec.n >= 2, "train: needs at least 2 modes");

  PipelineSpec current = spec;
  current.haar_override = spec.haar();
  TrainingTrace trace;
  double initial_loss = 0.0;
  for (int epoch = 0;; ++epoch) {
    const GaussianState state = build_pipeline(current);
    const auto lg = loss_and_grad(current, config);
    const double diff = diff_photon_sq(state, 0, 1);
    if (epoch == 0) {
      initial_loss = lg.loss;
      for (int j = 0; j < spec.n; ++j) trace.initial_means.push_back(mean_photon(state, j));
    } else if (lg.loss > 10.0 * initial_loss) {
      throw NumericalError("train: diverged at epoch " + std::to_string(epoch) + " (loss " +
                           std::to_string(lg.loss) + ", initial " + std::to_string(initial_loss) + ")");
    }
    for (int j = 0; j < spec.n; ++j)
      trace.max_mean_drift = std::max(trace.max_mean_drift, std::abs(mean_photon(state, j) - trace.initial_means[j]));
    trace.max_unitarity_defect = std::max(trace.max_unitarity_defect, unitarity_defect(current.trainable.unitary()));
    trace.loss_history.push_back(lg.loss);

    const bool hit_target = diff < config.target_diff;
    const bool stop = hit_target || epoch == config.max_epochs;
    if (epoch % config.log_every == 0 || stop)
      trace.records.push_back({epoch, lg.loss, mean_photon(state, 0), mean_photon(state, 1), diff, norm2(lg.grad)});
    if (stop) {
      trace.reached_target = hit_target;
      break;
    }
    auto& params = current.trainable.params();
    for (std::size_t p = 0; p < params.size(); ++p) params[p] -= config.learning_rate * lg.grad[p];
    ++trace.updates;
  }
  trace.final_params = current.trainable.params();
  return trace;
}

inline PipelineSpec with_params(PipelineSpec spec, std::vector<double> params) {
  spec.trainable = TrainableInterferometer(spec.n, std::move(params));
  return spec;
}

struct LossComparison {
  bool identical_squeezers;
  double mean_grad_norm;   // loss_mean gradient norm at the starting parameters
  double pair_grad_norm;   // loss_pair gradient norm at the starting parameters
  double initial_diff;
  double final_diff_pair;  // after training on loss_pair
  double final_diff_mean;  // after training on loss_mean
  TrainingTrace pair_trace;
  TrainingTrace mean_trace;
};

/// Trains once on each loss from the same starting point.
inline LossComparison compare_losses(const PipelineSpec& spec, const TrainingConfig& config) {
  TrainingConfig pair_cfg = config, mean_cfg = config;
  pair_cfg.loss = LossKind::pair;
  mean_cfg.loss = LossKind::mean;
  LossComparison out;
  out.identical_squeezers = spec.identical_squeezers();
  out.mean_grad_norm = norm2(loss_and_grad(spec, mean_cfg).grad);
  out.pair_grad_norm = norm2(loss_and_grad(spec, pair_cfg).grad);
  out.initial_diff = diff_photon_sq(build_pipeline(spec), 0, 1);
  out.pair_trace = train(spec, pair_cfg);
  out.mean_trace = train(spec, mean_cfg);
  out.final_diff_pair = diff_photon_sq(build_pipeline(with_params(spec, out.pair_trace.final_params)), 0, 1);
  out.final_diff_mean = diff_photon_sq(build_pipeline(with_params(spec, out.mean_trace.final_params)), 0, 1);
  return out;
}

inline void write_trace_csv(std::ostream& os, const TrainingTrace& trace, const std::vector<std::string>& header = {}) {
  for (const auto& h : header) os << "# " << h << '\n';
  os << "epoch,loss,mean_n0,mean_n1,diff_sq_01,grad_norm\n";
  os << std::setprecision(12);
  for (const auto& r : trace.records)
    os << r.epoch << ',' << r.loss << ',' << r.mean_n0 << ',' << r.mean_n1 << ',' << r.diff_sq_01 << ','
       << r.grad_norm << '\n';
}

}  // namespace gbs
