#pragma once

// Experiment configuration and the simulate / train / verify commands.
//
// Config grammar: INI style, "key = value" lines under [section] headers;
// whole-line comments start with '#' or ';'. Lists are comma separated and
// a single squeeze value broadcasts to every mode.
//
//   [experiment]
//   modes = 6
//   squeeze_r = 0.88
//   squeeze_phi = 0.785398163397
//   haar_seed = 1
//   pattern_totals = 2, 4
//   max_per_mode = 1
//   outputs = gbs_out
//
//   [train]
//   learning_rate = 0.01
//   max_epochs = 20000
//   target_diff = 0.05
//   grad_method = forward_jet
//   fd_step = 1e-5
//   seed = 0
//   log_every = 50
//
// The [train] section is optional; an empty one is the same as none, and
// `gbs train` fills in the defaults. Unknown sections or keys are rejected.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gbs/observables.hpp"
#include "gbs/patterns.hpp"
#include "gbs/training.hpp"
#include "gbs/verification.hpp"

namespace gbs {

struct ExperimentConfig {
  int modes = 6;
  std::vector<double> squeeze_r{0.88};
  std::vector<double> squeeze_phi{M_PI / 4};
  std::uint64_t haar_seed = 1;
  std::optional<TrainingConfig> train;
  std::string outputs = "gbs_out";
  std::vector<int> pattern_totals{2, 4};
  int max_per_mode = 1;

  static std::vector<double> broadcast(const std::vector<double>& v, int n, const char* key) {
    if (v.size() == 1) return std::vector<double>(n, v[0]);
    require(static_cast<int>(v.size()) == n, std::string(key) + ": expected 1 or " + std::to_string(n) + " values");
    return v;
  }

  void validate() const {
    require(modes >= 1, "modes must be >= 1");
    broadcast(squeeze_r, modes, "squeeze_r");
    broadcast(squeeze_phi, modes, "squeeze_phi");
    for (double r : squeeze_r) require(r >= 0.0, "squeeze_r must be non-negative");
    require(!pattern_totals.empty(), "pattern_totals must not be empty");
    require(max_per_mode >= 1, "max_per_mode must be >= 1");
    for (int t : pattern_totals) {
      require(t >= 0, "pattern_totals must be non-negative");
      require(t <= modes * max_per_mode, "pattern total " + std::to_string(t) + " is infeasible with at most " +
                                             std::to_string(max_per_mode) + " photons on each of " +
                                             std::to_string(modes) + " modes");
      require(t <= kDefaultMaxTotal, "pattern total " + std::to_string(t) + " exceeds the maximum " +
                                         std::to_string(kDefaultMaxTotal));
    }
    require(!outputs.empty(), "outputs must name a directory");
    if (train) train->validate();
  }

  PipelineSpec pipeline() const {
    PipelineSpec spec;
    spec.n = modes;
    spec.squeeze_r = broadcast(squeeze_r, modes, "squeeze_r");
    spec.squeeze_phi = broadcast(squeeze_phi, modes, "squeeze_phi");
    spec.haar_seed = haar_seed;
    spec.trainable = TrainableInterferometer(modes);
    return spec;
  }
};

namespace detail {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T value{};
    if (!(is >> value)) throw std::invalid_argument(key + ": cannot parse '" + text + "'");
    std::string rest;
    if (is >> rest) throw std::invalid_argument(key + ": trailing characters in '" + text + "'");
    out.push_back(value);
  }
  if (out.empty()) throw std::invalid_argument(key + ": empty value");
  return out;
}

template <typename T>
T parse_scalar(const std::string& text, const std::string& key) {
  const auto v = parse_list<T>(text, key);
  if (v.size() != 1) throw std::invalid_argument(key + ": expected a single value");
  return v[0];
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Canonical INI text. The hash is taken over the text without the outputs
/// line, so it identifies the experiment rather than where it was written.
inline std::string config_to_string(const ExperimentConfig& cfg, bool with_outputs = true) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[experiment]\n"
     << "modes = " << cfg.modes << '\n'
     << "squeeze_r = " << detail::join(cfg.squeeze_r) << '\n'
     << "squeeze_phi = " << detail::join(cfg.squeeze_phi) << '\n'
     << "haar_seed = " << cfg.haar_seed << '\n'
     << "pattern_totals = " << detail::join(cfg.pattern_totals) << '\n'
     << "max_per_mode = " << cfg.max_per_mode << '\n';
  if (with_outputs) os << "outputs = " << cfg.outputs << '\n';
  if (cfg.train) {
    const auto& t = *cfg.train;
    os << "\n[train]\n"
       << "learning_rate = " << t.learning_rate << '\n'
       << "max_epochs = " << t.max_epochs << '\n'
       << "target_diff = " << t.target_diff << '\n'
       << "grad_method = " << to_string(t.grad_method) << '\n'
       << "fd_step = " << t.fd_step << '\n'
       << "seed = " << t.seed << '\n'
       << "log_every = " << t.log_every << '\n';
  }
  return os.str();
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) { return detail::fnv1a(config_to_string(cfg, false)); }

/// Sets one key; shared by the file parser and command-line overrides.
inline void set_config_value(ExperimentConfig& cfg, const std::string& section, const std::string& key,
                             const std::string& value) {
  using detail::parse_list;
  using detail::parse_scalar;
  if (section == "experiment") {
    if (key == "modes") cfg.modes = parse_scalar<int>(value, key);
    else if (key == "squeeze_r") cfg.squeeze_r = parse_list<double>(value, key);
    else if (key == "squeeze_phi") cfg.squeeze_phi = parse_list<double>(value, key);
    else if (key == "haar_seed") cfg.haar_seed = parse_scalar<std::uint64_t>(value, key);
    else if (key == "pattern_totals") cfg.pattern_totals = parse_list<int>(value, key);
    else if (key == "max_per_mode") cfg.max_per_mode = parse_scalar<int>(value, key);
    else if (key == "outputs") cfg.outputs = value;
    else throw std::invalid_argument("unknown key '" + key + "' in [experiment]");
    return;
  }
  if (section == "train") {
    if (!cfg.train) cfg.train = TrainingConfig{};
    auto& t = *cfg.train;
    if (key == "learning_rate") t.learning_rate = parse_scalar<double>(value, key);
    else if (key == "max_epochs") t.max_epochs = parse_scalar<int>(value, key);
    else if (key == "target_diff") t.target_diff = parse_scalar<double>(value, key);
    else if (key == "grad_method") t.grad_method = parse_grad_method(value);
    else if (key == "fd_step") t.fd_step = parse_scalar<double>(value, key);
    else if (key == "seed") t.seed = parse_scalar<std::uint64_t>(value, key);
    else if (key == "log_every") t.log_every = parse_scalar<int>(value, key);
    else throw std::invalid_argument("unknown key '" + key + "' in [train]");
    return;
  }
  throw std::invalid_argument("unknown config section '" + section + "'");
}

inline ExperimentConfig parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section != "experiment" && section != "train") {
      if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside a section");
      throw std::invalid_argument("unknown config section '" + section + "'");
    }
    for (const auto& [key, value] : body) set_config_value(cfg, section, key, value.get_value<std::string>());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  return parse_config(in);
}

inline std::vector<std::string> output_header(const ExperimentConfig& cfg, const std::string& command) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  std::vector<std::string> h = {"gbs " + command, "config_hash = " + hash.str(),
                                "modes = " + std::to_string(cfg.modes), "haar_seed = " + std::to_string(cfg.haar_seed)};
  if (cfg.train) h.push_back("train_seed = " + std::to_string(cfg.train->seed));
  h.push_back("pattern_totals = " + detail::join(cfg.pattern_totals));
  return h;
}

namespace detail {

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir) { std::filesystem::create_directories(root_); }

  /// Opens a file directly inside the output directory.
  std::ofstream open(const std::string& name) {
    require(name.find('/') == std::string::npos, "output file names must not contain '/'");
    const auto path = root_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(path);
    return out;
  }

  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> written_;
};

inline void write_observables(std::ostream& os, const GaussianState& state, const std::vector<std::string>& header) {
  for (const auto& h : header) os << "# " << h << '\n';
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < state.n_modes(); ++j)
    for (int k = j + 1; k < state.n_modes(); ++k) pairs.emplace_back(j, k);
  const auto rep = observe(state, pairs);
  os << std::setprecision(12);
  for (int j = 0; j < state.n_modes(); ++j) os << "mean_n" << j << " = " << rep.per_mode_mean[j] << '\n';
  os << "total_mean = " << rep.total_mean << '\n';
  for (std::size_t p = 0; p < rep.pairs.size(); ++p)
    os << "diff_sq_" << rep.pairs[p].first << rep.pairs[p].second << " = " << rep.pairwise_diff_sq[p]
       << (rep.clipped[p] ? "  # clipped" : "") << '\n';
  os << "loss_pair = " << (state.n_modes() >= 2 ? loss_pair(state) : 1.0) << '\n';
  os << "loss_mean = " << (state.n_modes() >= 2 ? loss_mean(state) : 1.0) << '\n';
}

}  // namespace detail

/// Writes distribution_total<T>.txt per requested total and observables.txt.
inline std::vector<std::filesystem::path> cmd_simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto header = output_header(cfg, "simulate");
  const GaussianState state = build_pipeline(cfg.pipeline());
  detail::OutputDir out(cfg.outputs);
  for (int total : cfg.pattern_totals) {
    auto f = out.open("distribution_total" + std::to_string(total) + ".txt");
    write_distribution(f, distribution(state, total, cfg.haar_seed, cfg.max_per_mode), header);
  }
  auto obs = out.open("observables.txt");
  detail::write_observables(obs, state, header);
  return out.written();
}

/// Writes trace.csv, params.txt, and per total the initial and final
/// distributions plus an enhancement table (final / initial).
inline std::vector<std::filesystem::path> cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.modes >= 2, "train needs at least 2 modes");
  const TrainingConfig tcfg = cfg.train.value_or(TrainingConfig{});
  ExperimentConfig effective = cfg;
  effective.train = tcfg;
  const auto header = output_header(effective, "train");

  const PipelineSpec spec = cfg.pipeline();
  const TrainingTrace trace = train(spec, tcfg);
  const PipelineSpec trained = with_params(spec, trace.final_params);
  const GaussianState before = build_pipeline(spec);
  const GaussianState after = build_pipeline(trained);

  detail::OutputDir out(cfg.outputs);
  {
    auto f = out.open("trace.csv");
    write_trace_csv(f, trace, header);
  }
  {
    auto f = out.open("params.txt");
    for (const auto& h : header) f << "# " << h << '\n';
    f << config_to_string(effective, false) << "\n[result]\n"
      << "updates = " << trace.updates << '\n'
      << "reached_target = " << (trace.reached_target ? "true" : "false") << '\n'
      << "params = " << detail::join(trace.final_params) << '\n';
  }
  for (int total : cfg.pattern_totals) {
    const auto d0 = distribution(before, total, cfg.haar_seed, cfg.max_per_mode);
    const auto d1 = distribution(after, total, cfg.haar_seed, cfg.max_per_mode);
    {
      auto f = out.open("distribution_initial_total" + std::to_string(total) + ".txt");
      write_distribution(f, d0, header);
    }
    {
      auto f = out.open("distribution_final_total" + std::to_string(total) + ".txt");
      write_distribution(f, d1, header);
    }
    auto f = out.open("enhancement_total" + std::to_string(total) + ".txt");
    for (const auto& h : header) f << "# " << h << '\n';
    f << "# pattern initial final ratio\n";
    for (std::size_t i = 0; i < d0.entries.size(); ++i) {
      const double p0 = d0.entries[i].probability, p1 = d1.entries[i].probability;
      f << d0.entries[i].pattern.to_string() << ' ' << format_probability(p0) << ' ' << format_probability(p1) << ' '
        << (p0 > 0.0 ? format_probability(p1 / p0) : std::string("inf")) << '\n';
    }
  }
  return out.written();
}

/// Runs the battery, printing one line per check; true when all pass.
inline bool cmd_verify(std::ostream& os) {
  bool ok = true;
  for (const auto& r : run_verification_battery()) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace gbs
