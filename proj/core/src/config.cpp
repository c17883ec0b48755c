// Copyright 2026 The tiltsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tiltsearch/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tiltsearch/metrics.hpp"

namespace tiltsearch {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& field, const std::string& why, int line = 0) {
  std::string msg = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
  msg += field.empty() ? why : field + ": " + why;
  throw ConfigError(msg, line, field);
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string StripComment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

int BracketBalance(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

// Quote bare identifiers so `[RFJS, GS]` or `greedy` read as JSON strings.
json ParseValue(const std::string& raw, const std::string& key, int line) {
  std::string text = raw;
  if (text.find('"') == std::string::npos) {
    static const std::regex bare(R"((^|[\[,\s])([A-Za-z_./~][A-Za-z0-9_\-./~]*)(?=$|[\],\s]))");
    std::string out;
    std::sregex_iterator it(text.begin(), text.end(), bare), end;
    std::size_t last = 0;
    for (; it != end; ++it) {
      const auto& m = *it;
      const std::string word = m[2].str();
      out.append(text, last, static_cast<std::size_t>(m.position(2)) - last);
      if (word == "true" || word == "false" || word == "null") {
        out += word;
      } else {
        out += '"' + word + '"';
      }
      last = static_cast<std::size_t>(m.position(2) + m.length(2));
    }
    out.append(text, last, std::string::npos);
    text = out;
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(key, std::string("malformed value: ") + e.what(), line);
  }
}

template <typename T>
T As(const json& v, const std::string& key, int line) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    Fail(key, "value has the wrong type", line);
  }
}

int AsInt(const json& v, const std::string& key, int line) {
  if (!v.is_number_integer()) Fail(key, "expected an integer", line);
  return v.get<int>();
}

double AsDouble(const json& v, const std::string& key, int line) {
  if (!v.is_number()) Fail(key, "expected a number", line);
  return v.get<double>();
}

std::vector<int> AsIntList(const json& v, const std::string& key, int line) {
  if (!v.is_array()) Fail(key, "expected an array of integers", line);
  std::vector<int> out;
  for (const json& e : v) out.push_back(AsInt(e, key, line));
  return out;
}

template <typename E>
E AsEnum(const json& v, const std::string& key, int line,
         const std::vector<std::pair<std::string, E>>& names) {
  if (!v.is_string()) Fail(key, "expected a name", line);
  const std::string s = v.get<std::string>();
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  Fail(key, "unknown value '" + s + "'", line);
}

const std::vector<std::pair<std::string, Strategy>> kStrategyNames = {
    {"BON", Strategy::kBestOfN}, {"GS", Strategy::kGreedySearch}, {"RFJS", Strategy::kRecursiveForkJoin}};
const std::vector<std::pair<std::string, SideKind>> kSideNames = {{"linear", SideKind::kLinear},
                                                                  {"mlp", SideKind::kMlp}};
const std::vector<std::pair<std::string, RewardKind>> kRewardNames = {
    {"neg_quadratic", RewardKind::kNegQuadratic}, {"cosine", RewardKind::kCosine}};
const std::vector<std::pair<std::string, ResampleMode>> kResampleNames = {
    {"greedy", ResampleMode::kGreedy}, {"categorical", ResampleMode::kCategorical}};
const std::vector<std::pair<std::string, CategoricalWeights>> kWeightNames = {
    {"incremental", CategoricalWeights::kIncremental}, {"absolute", CategoricalWeights::kAbsolute}};
const std::vector<std::pair<std::string, ZetaMode>> kZetaNames = {{"normalized", ZetaMode::kNormalized},
                                                                  {"raw", ZetaMode::kRaw}};
const std::vector<std::pair<std::string, GradientMode>> kGradientNames = {
    {"analytic", GradientMode::kAnalytic}, {"finite_difference", GradientMode::kFiniteDifference}};

template <typename E>
std::string NameOf(E value, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&, int)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> setters = {
      {"schedule_steps", [](auto& c, const json& v, auto& k, int l) { c.schedule_steps = AsInt(v, k, l); }},
      {"beta_min", [](auto& c, const json& v, auto& k, int l) { c.beta_min = AsDouble(v, k, l); }},
      {"beta_max", [](auto& c, const json& v, auto& k, int l) { c.beta_max = AsDouble(v, k, l); }},
      {"prior_weights",
       [](auto& c, const json& v, auto& k, int l) { c.prior_weights = As<std::vector<double>>(v, k, l); }},
      {"prior_means",
       [](auto& c, const json& v, auto& k, int l) {
         c.prior_means = As<std::vector<std::vector<double>>>(v, k, l);
       }},
      {"prior_covariances",
       [](auto& c, const json& v, auto& k, int l) {
         c.prior_covariances = As<std::vector<std::vector<std::vector<double>>>>(v, k, l);
       }},
      {"meas_dim", [](auto& c, const json& v, auto& k, int l) { c.meas_dim = AsInt(v, k, l); }},
      {"side_dim", [](auto& c, const json& v, auto& k, int l) { c.side_dim = AsInt(v, k, l); }},
      {"operator_norm", [](auto& c, const json& v, auto& k, int l) { c.operator_norm = AsDouble(v, k, l); }},
      {"side_norm", [](auto& c, const json& v, auto& k, int l) { c.side_norm = AsDouble(v, k, l); }},
      {"sigma_y", [](auto& c, const json& v, auto& k, int l) { c.sigma_y = AsDouble(v, k, l); }},
      {"sigma_s", [](auto& c, const json& v, auto& k, int l) { c.sigma_s = AsDouble(v, k, l); }},
      {"side_kind", [](auto& c, const json& v, auto& k, int l) { c.side_kind = AsEnum(v, k, l, kSideNames); }},
      {"mlp_hidden", [](auto& c, const json& v, auto& k, int l) { c.mlp_hidden = AsIntList(v, k, l); }},
      {"mlp_output", [](auto& c, const json& v, auto& k, int l) { c.mlp_output = AsInt(v, k, l); }},
      {"reward_kind",
       [](auto& c, const json& v, auto& k, int l) { c.reward_kind = AsEnum(v, k, l, kRewardNames); }},
      {"tau", [](auto& c, const json& v, auto& k, int l) { c.tau = AsDouble(v, k, l); }},
      {"zeta", [](auto& c, const json& v, auto& k, int l) { c.guidance.zeta = AsDouble(v, k, l); }},
      {"zeta_mode",
       [](auto& c, const json& v, auto& k, int l) { c.guidance.zeta_mode = AsEnum(v, k, l, kZetaNames); }},
      {"eta", [](auto& c, const json& v, auto& k, int l) { c.guidance.eta = AsDouble(v, k, l); }},
      {"rgg_scale", [](auto& c, const json& v, auto& k, int l) { c.guidance.rgg_scale = AsDouble(v, k, l); }},
      {"rgg_gradient",
       [](auto& c, const json& v, auto& k, int l) { c.guidance.rgg_mode = AsEnum(v, k, l, kGradientNames); }},
      {"strategies",
       [](auto& c, const json& v, auto& k, int l) {
         if (!v.is_array()) Fail(k, "expected an array of strategy names", l);
         c.strategies.clear();
         for (const json& e : v) c.strategies.push_back(AsEnum(e, k, l, kStrategyNames));
       }},
      {"particles", [](auto& c, const json& v, auto& k, int l) { c.particles = AsIntList(v, k, l); }},
      {"base_B", [](auto& c, const json& v, auto& k, int l) { c.bases = AsIntList(v, k, l); }},
      {"resample_mode",
       [](auto& c, const json& v, auto& k, int l) { c.resample_mode = AsEnum(v, k, l, kResampleNames); }},
      {"categorical_weights",
       [](auto& c, const json& v, auto& k, int l) { c.categorical_weights = AsEnum(v, k, l, kWeightNames); }},
      {"trial_count", [](auto& c, const json& v, auto& k, int l) { c.trial_count = AsInt(v, k, l); }},
      {"repetitions", [](auto& c, const json& v, auto& k, int l) { c.repetitions = AsInt(v, k, l); }},
      {"master_seed",
       [](auto& c, const json& v, auto& k, int l) {
         if (!v.is_number_unsigned()) Fail(k, "expected a nonnegative 64-bit integer", l);
         c.master_seed = v.get<std::uint64_t>();
       }},
      {"output_dir",
       [](auto& c, const json& v, auto& k, int l) {
         if (!v.is_string()) Fail(k, "expected a path string", l);
         c.output_dir = v.get<std::string>();
       }},
      {"psnr_peak",
       [](auto& c, const json& v, auto& k, int l) {
         if (v.is_string() && v.get<std::string>() == "auto") {
           c.psnr_peak.reset();
         } else {
           c.psnr_peak = AsDouble(v, k, l);
         }
       }},
      {"psnr_cap", [](auto& c, const json& v, auto& k, int l) { c.psnr_cap = AsDouble(v, k, l); }},
      {"demo_base_B", [](auto& c, const json& v, auto& k, int l) { c.demo_bases = AsIntList(v, k, l); }},
      {"demo_particles", [](auto& c, const json& v, auto& k, int l) { c.demo_particles = AsInt(v, k, l); }},
      {"demo_repetitions",
       [](auto& c, const json& v, auto& k, int l) { c.demo_repetitions = AsInt(v, k, l); }},
      {"demo_trial", [](auto& c, const json& v, auto& k, int l) { c.demo_trial = AsInt(v, k, l); }},
  };
  return setters;
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T, typename F>
std::string List(const std::vector<T>& items, F&& fmt) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ", ";
    s += fmt(items[i]);
  }
  return s + "]";
}

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, std::string field)
    : std::runtime_error(message), line_(line), field_(std::move(field)) {}

ExperimentConfig::ExperimentConfig() {
  constexpr int kRing = 5;
  constexpr double kRadius = 2.0;
  constexpr double kVariance = 0.0625;
  for (int k = 0; k < kRing; ++k) {
    const double angle = 2.0 * 3.14159265358979323846 * k / kRing;
    prior_weights.push_back(1.0 / kRing);
    prior_means.push_back({kRadius * std::cos(angle), kRadius * std::sin(angle)});
    prior_covariances.push_back({{kVariance, 0.0}, {0.0, kVariance}});
  }
}

void ExperimentConfig::Validate() const {
  if (schedule_steps < 1) Fail("schedule_steps", "must be >= 1");
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
    Fail("beta_min", "need 0 < beta_min <= beta_max < 1");
  }
  if (prior_weights.empty()) Fail("prior_weights", "must be nonempty");
  if (prior_means.size() != prior_weights.size()) Fail("prior_means", "one mean per weight");
  if (prior_covariances.size() != prior_weights.size()) {
    Fail("prior_covariances", "one covariance per weight");
  }
  try {
    Prior();
  } catch (const std::invalid_argument& e) {
    Fail("prior_covariances", e.what());
  }
  const int d = static_cast<int>(prior_means.front().size());
  if (meas_dim < 1 || meas_dim > kMaxDim) Fail("meas_dim", "must be in [1, 16]");
  if (side_dim < 1 || side_dim > kMaxDim) Fail("side_dim", "must be in [1, 16]");
  if (!(operator_norm > 0.0)) Fail("operator_norm", "must be positive");
  if (!(side_norm > 0.0)) Fail("side_norm", "must be positive");
  if (!(sigma_y >= 0.0)) Fail("sigma_y", "must be >= 0");
  if (!(sigma_s >= 0.0)) Fail("sigma_s", "must be >= 0");
  if (side_kind == SideKind::kLinear && d < 2) Fail("side_kind", "linear side information needs d >= 2");
  for (int w : mlp_hidden) {
    if (w < 1 || w > 128) Fail("mlp_hidden", "widths must be in [1, 128]");
  }
  if (mlp_output < 1 || mlp_output > kMaxDim) Fail("mlp_output", "must be in [1, 16]");
  const RewardKind expected = side_kind == SideKind::kLinear ? RewardKind::kNegQuadratic : RewardKind::kCosine;
  if (reward_kind != expected) Fail("reward_kind", "does not match side_kind");
  if (!(tau > 0.0)) Fail("tau", "must be positive");
  try {
    guidance.Validate();
  } catch (const std::invalid_argument& e) {
    Fail("zeta", e.what());
  }
  if (strategies.empty()) Fail("strategies", "must be nonempty");
  if (particles.empty()) Fail("particles", "must be nonempty");
  if (bases.empty()) Fail("base_B", "must be nonempty");
  for (int n : particles) {
    if (n < 1) Fail("particles", "must be >= 1");
  }
  for (int b : bases) {
    if (b < 1) Fail("base_B", "must be >= 1");
  }
  const bool rfjs = std::find(strategies.begin(), strategies.end(), Strategy::kRecursiveForkJoin) !=
                    strategies.end();
  if (rfjs) {
    for (int n : particles) {
      if (!IsPowerOfTwo(n)) Fail("particles", "RFJS needs powers of two, got " + std::to_string(n));
    }
    for (int b : bases) {
      if (!IsPowerOfTwo(b)) Fail("base_B", "RFJS needs powers of two, got " + std::to_string(b));
    }
  }
  if (trial_count < 1) Fail("trial_count", "must be >= 1");
  if (repetitions < 1) Fail("repetitions", "must be >= 1");
  if (psnr_peak && !(*psnr_peak > 0.0)) Fail("psnr_peak", "must be positive");
  if (!(psnr_cap > 0.0)) Fail("psnr_cap", "must be positive");
  if (demo_bases.empty()) Fail("demo_base_B", "must be nonempty");
  for (int b : demo_bases) {
    if (!IsPowerOfTwo(b)) Fail("demo_base_B", "must be powers of two");
  }
  if (!IsPowerOfTwo(demo_particles)) Fail("demo_particles", "must be a power of two");
  if (demo_repetitions < 1) Fail("demo_repetitions", "must be >= 1");
  if (demo_trial < 0) Fail("demo_trial", "must be >= 0");
}

GaussianMixture ExperimentConfig::Prior() const {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  const std::size_t d = prior_means.empty() ? 0 : prior_means.front().size();
  if (d == 0 || d > static_cast<std::size_t>(kMaxDim)) {
    throw std::invalid_argument("prior dimension must be in [1, 16]");
  }
  for (std::size_t k = 0; k < prior_means.size(); ++k) {
    if (prior_means[k].size() != d) throw std::invalid_argument("prior means differ in dimension");
    Vector m(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) m[i] = prior_means[k][i];
    means.push_back(m);
    const auto& rows = prior_covariances.at(k);
    if (rows.size() != d) throw std::invalid_argument("covariance has the wrong number of rows");
    Matrix c(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      if (rows[i].size() != d) throw std::invalid_argument("covariance row has the wrong length");
      for (std::size_t j = 0; j < d; ++j) c(i, j) = rows[i][j];
    }
    covs.push_back(c);
  }
  return GaussianMixture(prior_weights, std::move(means), std::move(covs));
}

DiffusionSchedule ExperimentConfig::Schedule() const {
  return DiffusionSchedule::Linear(schedule_steps, beta_min, beta_max);
}

TrialOptions ExperimentConfig::Trial() const {
  TrialOptions o;
  o.meas_dim = meas_dim;
  o.side_dim = side_kind == SideKind::kLinear ? side_dim : mlp_output;
  o.operator_norm = operator_norm;
  o.side_norm = side_norm;
  o.sigma_y = sigma_y;
  o.sigma_s = sigma_s;
  o.side_kind = side_kind;
  o.mlp_hidden = mlp_hidden;
  return o;
}

double ExperimentConfig::Peak() const { return psnr_peak ? *psnr_peak : PeakFromPrior(Prior()); }

SearchConfig ExperimentConfig::Search(Strategy strategy, int n, int base) const {
  SearchConfig s;
  s.strategy = strategy;
  s.particles = n;
  s.base = base;
  s.tau = tau;
  s.resample_mode = resample_mode;
  s.categorical_weights = categorical_weights;
  return s;
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig config;
  bool reward_given = false;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Trim(StripComment(raw));
    if (line.empty()) continue;
    const int start_line = line_no;
    const auto eq = line.find('=');
    if (eq == std::string::npos) Fail("", "expected 'key = value'", start_line);
    const std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    while (BracketBalance(value) > 0 && std::getline(in, raw)) {
      ++line_no;
      value += ' ' + Trim(StripComment(raw));
    }
    if (BracketBalance(value) != 0) Fail(key, "unbalanced brackets", start_line);
    if (value.empty()) Fail(key, "missing value", start_line);
    const auto& setters = Setters();
    const auto it = setters.find(key);
    if (it == setters.end()) Fail(key, "unknown key", start_line);
    if (!seen.insert(key).second) Fail(key, "repeated key", start_line);
    it->second(config, ParseValue(value, key, start_line), key, start_line);
    if (key == "reward_kind") reward_given = true;
  }
  if (!reward_given) {
    config.reward_kind =
        config.side_kind == SideKind::kLinear ? RewardKind::kNegQuadratic : RewardKind::kCosine;
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, "");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string ToCanonical(const ExperimentConfig& c) {
  auto ints = [](const std::vector<int>& v) { return List(v, [](int x) { return std::to_string(x); }); };
  auto nums = [](const std::vector<double>& v) { return List(v, Num); };
  std::ostringstream os;
  os << "schedule_steps = " << c.schedule_steps << '\n';
  os << "beta_min = " << Num(c.beta_min) << '\n';
  os << "beta_max = " << Num(c.beta_max) << '\n';
  os << "prior_weights = " << nums(c.prior_weights) << '\n';
  os << "prior_means = " << List(c.prior_means, nums) << '\n';
  os << "prior_covariances = "
     << List(c.prior_covariances, [&](const auto& m) { return List(m, nums); }) << '\n';
  os << "meas_dim = " << c.meas_dim << '\n';
  os << "side_dim = " << c.side_dim << '\n';
  os << "operator_norm = " << Num(c.operator_norm) << '\n';
  os << "side_norm = " << Num(c.side_norm) << '\n';
  os << "sigma_y = " << Num(c.sigma_y) << '\n';
  os << "sigma_s = " << Num(c.sigma_s) << '\n';
  os << "side_kind = " << NameOf(c.side_kind, kSideNames) << '\n';
  os << "mlp_hidden = " << ints(c.mlp_hidden) << '\n';
  os << "mlp_output = " << c.mlp_output << '\n';
  os << "reward_kind = " << NameOf(c.reward_kind, kRewardNames) << '\n';
  os << "tau = " << Num(c.tau) << '\n';
  os << "zeta = " << Num(c.guidance.zeta) << '\n';
  os << "zeta_mode = " << NameOf(c.guidance.zeta_mode, kZetaNames) << '\n';
  os << "eta = " << Num(c.guidance.eta) << '\n';
  os << "rgg_scale = " << Num(c.guidance.rgg_scale) << '\n';
  os << "rgg_gradient = " << NameOf(c.guidance.rgg_mode, kGradientNames) << '\n';
  os << "strategies = "
     << List(c.strategies, [](Strategy s) { return NameOf(s, kStrategyNames); }) << '\n';
  os << "particles = " << ints(c.particles) << '\n';
  os << "base_B = " << ints(c.bases) << '\n';
  os << "resample_mode = " << NameOf(c.resample_mode, kResampleNames) << '\n';
  os << "categorical_weights = " << NameOf(c.categorical_weights, kWeightNames) << '\n';
  os << "trial_count = " << c.trial_count << '\n';
  os << "repetitions = " << c.repetitions << '\n';
  os << "master_seed = " << c.master_seed << '\n';
  os << "output_dir = " << json(c.output_dir).dump() << '\n';
  os << "psnr_peak = " << (c.psnr_peak ? Num(*c.psnr_peak) : std::string("auto")) << '\n';
  os << "psnr_cap = " << Num(c.psnr_cap) << '\n';
  os << "demo_base_B = " << ints(c.demo_bases) << '\n';
  os << "demo_particles = " << c.demo_particles << '\n';
  os << "demo_repetitions = " << c.demo_repetitions << '\n';
  os << "demo_trial = " << c.demo_trial << '\n';
  return os.str();
}

}  // namespace tiltsearch
