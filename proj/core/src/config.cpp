#include "lba/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lba/errors.hpp"

namespace lba::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "schema_version",
      "plant.kind", "plant.gain", "plant.noise_var", "plant.initial_var", "plant.gain_matrix",
      "plant.noise_cov", "plant.initial_cov", "plant.dynamics", "plant.rkhs_norm_bound",
      "plant.learning_noise_var",
      "prior.kind", "prior.half_width",
      "controller.policy", "controller.gain", "controller.gain_matrix",
      "controller.depends_on_gain", "controller.privacy", "controller.privacy_var",
      "controller.privacy_cov", "controller.eta", "controller.eta_unchecked", "controller.lq_q",
      "controller.lq_r",
      "attack.kind", "attack.learning_length", "attack.malicious", "attack.malicious_gain",
      "attack.kernel_length_scale", "attack.kernel_signal_var", "attack.kernel_white_var",
      "attack.gp_standardize",
      "detector.test", "detector.tolerance", "detector.test_time",
      "bounds.beta", "bounds.zeta", "bounds.rho", "bounds.horizon_gap",
      "sweep.axis", "sweep.values", "sweep.trials", "sweep.seed", "sweep.threads",
  };
  return keys;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
    cfg.values_[full] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_number(key, raw(key));
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<double> KeyValueConfig::find_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double v = get_double(key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + raw(key) + "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = trim(raw(key));
  std::uint64_t v = 0;
  const auto* end = t.data() + t.size();
  const auto res = std::from_chars(t.data(), end, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("key '" + key + "': expected an unsigned 64-bit integer, got '" + t + "'");
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = lower(trim(raw(key)));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + raw(key) + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_tokens(raw(key))) out.push_back(parse_number(key, tok));
  return out;
}

Eigen::MatrixXd KeyValueConfig::get_matrix(const std::string& key) const {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(raw(key));
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> r;
    for (const auto& tok : split_tokens(row)) r.push_back(parse_number(key, tok));
    if (!r.empty()) rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("key '" + key + "': empty matrix");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("key '" + key + "': ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const KeyValueConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  // Thread count does not change results, so it is left out of the hash.
  KeyValueConfig hashed = cfg;
  hashed.erase("sweep.threads");
  for (unsigned char c : hashed.canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Eigen::Index PlantSpec::dim() const {
  return kind == PlantKind::vector ? vector.dim() : 1;
}

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::ls_scalar: return "ls_scalar";
    case AttackKind::ls_vector: return "ls_vector";
    case AttackKind::gp: return "gp";
    case AttackKind::replay: return "replay";
  }
  return "?";
}

namespace {

SymmetricMatrix symmetric_from(const KeyValueConfig& kv, const std::string& key) {
  try {
    return SymmetricMatrix(kv.get_matrix(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

PlantSpec build_plant(const KeyValueConfig& kv) {
  PlantSpec p;
  const std::string kind = kv.get_string("plant.kind", "scalar");
  if (kind == "scalar") {
    p.kind = PlantKind::scalar;
    p.scalar.gain = kv.get_double("plant.gain", 1.0);
    p.scalar.noise_var = kv.get_double("plant.noise_var", 1.0);
    if (auto v = kv.find_double("plant.initial_var")) p.scalar.initial_var = *v;
    p.x0_defaulted = !kv.has("plant.initial_var");
  } else if (kind == "vector") {
    p.kind = PlantKind::vector;
    p.vector.gain = kv.get_matrix("plant.gain_matrix");
    p.vector.noise_cov = symmetric_from(kv, "plant.noise_cov");
    if (kv.has("plant.initial_cov")) p.vector.initial_cov = symmetric_from(kv, "plant.initial_cov");
    p.x0_defaulted = !kv.has("plant.initial_cov");
  } else if (kind == "nonlinear") {
    p.kind = PlantKind::nonlinear;
    p.nonlinear.dynamics = plant::find_dynamics(kv.get_string("plant.dynamics", "quadratic-sine"));
    p.nonlinear.noise_var = kv.get_double("plant.noise_var", 1.0);
    p.nonlinear.rkhs_norm_bound = kv.get_double("plant.rkhs_norm_bound", 1.0);
    if (auto v = kv.find_double("plant.initial_var")) p.nonlinear.initial_var = *v;
    p.x0_defaulted = !kv.has("plant.initial_var");
  } else {
    throw ConfigError("unknown plant.kind '" + kind + "'");
  }
  if (auto v = kv.find_double("plant.learning_noise_var")) p.learning_noise_var = *v;

  const std::string prior = kv.get_string("prior.kind", "fixed");
  if (prior == "fixed") {
    p.prior = plant::GainPrior::fixed(p.scalar.gain);
  } else if (prior == "uniform") {
    if (p.kind != PlantKind::scalar) throw ConfigError("uniform gain prior needs a scalar plant");
    p.prior = plant::GainPrior::uniform(kv.get_double("prior.half_width"));
  } else {
    throw ConfigError("unknown prior.kind '" + prior + "'");
  }
  return p;
}

ControllerSpec build_controller(const KeyValueConfig& kv) {
  ControllerSpec c;
  const std::string policy = kv.get_string("controller.policy", "zero");
  if (policy == "zero") {
    c.policy = control::ControlPolicy::zero();
  } else if (policy == "linear") {
    c.policy = control::ControlPolicy::linear(kv.get_double("controller.gain"));
  } else if (policy == "matrix") {
    c.policy = control::ControlPolicy::matrix(kv.get_matrix("controller.gain_matrix"));
  } else if (policy == "quadratic") {
    c.policy = control::ControlPolicy::quadratic(kv.get_double("controller.gain"));
  } else {
    throw ConfigError("unknown controller.policy '" + policy + "'");
  }
  c.depends_on_gain = kv.get_bool("controller.depends_on_gain", false);

  const std::string privacy = kv.get_string("controller.privacy", "none");
  if (privacy == "none") {
    c.privacy = control::PrivacySignalSpec::none();
  } else if (privacy == "iid") {
    c.privacy = control::PrivacySignalSpec::iid(kv.get_double("controller.privacy_var"));
  } else if (privacy == "iid_vector") {
    c.privacy = control::PrivacySignalSpec::iid_vector(symmetric_from(kv, "controller.privacy_cov"));
  } else if (privacy == "recursive") {
    c.privacy = control::PrivacySignalSpec::recursive(kv.get_double("controller.eta", 3.0),
                                                      kv.get_bool("controller.eta_unchecked", false));
  } else {
    throw ConfigError("unknown controller.privacy '" + privacy + "'");
  }
  c.weights.q = kv.get_double("controller.lq_q", 1.0);
  c.weights.r = kv.get_double("controller.lq_r", 1.0);
  return c;
}

AttackSpec build_attack(const KeyValueConfig& kv, PlantKind plant_kind) {
  AttackSpec a;
  const std::string kind = kv.get_string("attack.kind", "none");
  if (kind == "none") {
    a.kind = AttackKind::none;
  } else if (kind == "ls") {
    a.kind = plant_kind == PlantKind::vector ? AttackKind::ls_vector : AttackKind::ls_scalar;
  } else if (kind == "ls_scalar") {
    a.kind = AttackKind::ls_scalar;
  } else if (kind == "ls_vector") {
    a.kind = AttackKind::ls_vector;
  } else if (kind == "gp") {
    a.kind = AttackKind::gp;
  } else if (kind == "replay") {
    a.kind = AttackKind::replay;
  } else {
    throw ConfigError("unknown attack.kind '" + kind + "'");
  }
  a.learning = kv.get_size("attack.learning_length", 0);

  const std::string rule = kv.get_string("attack.malicious", "destabilize");
  if (rule == "destabilize") {
    a.malicious = {attack::MaliciousActuation::Kind::destabilize_gain,
                   kv.get_double("attack.malicious_gain", std::nan(""))};
  } else if (rule == "zero") {
    a.malicious = attack::MaliciousActuation::zero();
  } else {
    throw ConfigError("unknown attack.malicious '" + rule + "'");
  }
  a.kernel.length_scale = kv.get_double("attack.kernel_length_scale", 1.0);
  a.kernel.signal_var = kv.get_double("attack.kernel_signal_var", 1.0);
  a.kernel.white_var = kv.get_double("attack.kernel_white_var", 0.1);
  a.gp_standardize = kv.get_bool("attack.gp_standardize", true);
  return a;
}

}  // namespace

void ExperimentConfig::validate() const {
  switch (plant.kind) {
    case PlantKind::scalar: plant.scalar.validate(); break;
    case PlantKind::vector: plant.vector.validate(); break;
    case PlantKind::nonlinear: plant.nonlinear.validate(); break;
  }
  plant.prior.validate();
  if (plant.learning_noise_var && !(*plant.learning_noise_var >= 0.0)) {
    throw ConfigError("plant.learning_noise_var must be >= 0");
  }
  controller.privacy.validate();
  controller.weights.validate();

  const Eigen::Index n = plant.dim();
  const auto& pol = controller.policy;
  if (pol.kind == control::ControlPolicy::Kind::linear_gain_matrix &&
      (pol.gain_matrix.rows() != n || pol.gain_matrix.cols() != n)) {
    throw ConfigError("controller.gain_matrix must be " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
  if (n != 1 && (pol.kind == control::ControlPolicy::Kind::linear_gain ||
                 pol.kind == control::ControlPolicy::Kind::quadratic)) {
    throw ConfigError("scalar control policy on a vector plant");
  }
  using PK = control::PrivacySignalSpec::Kind;
  if (controller.privacy.kind == PK::iid_gaussian_vector && controller.privacy.covariance.dim() != n) {
    throw ConfigError("controller.privacy_cov dimension does not match the plant");
  }
  if ((controller.privacy.kind == PK::iid_gaussian || controller.privacy.kind == PK::recursive_target) &&
      plant.kind != PlantKind::scalar) {
    throw ConfigError("scalar privacy signals need a scalar linear plant");
  }
  if (controller.privacy.kind == PK::recursive_target && plant.prior.kind != plant::GainPrior::Kind::fixed) {
    throw ConfigError("the recursive privacy signal needs a fixed plant gain");
  }

  if (plant.kind == PlantKind::vector && detector.test != TestKind::covariance) {
    throw ConfigError("vector plants are checked with detector.test = covariance");
  }
  if (plant.kind != PlantKind::vector && detector.test != TestKind::variance) {
    throw ConfigError("scalar plants are checked with detector.test = variance");
  }
  if (!(detector.tolerance > 0.0)) throw ConfigError("detector.tolerance must be > 0");
  if (detector.test_time < 1) throw ConfigError("detector.test_time must be >= 1");

  switch (attack.kind) {
    case AttackKind::none: break;
    case AttackKind::ls_scalar:
      if (plant.kind != PlantKind::scalar) throw ConfigError("attack.kind ls_scalar needs a scalar plant");
      break;
    case AttackKind::ls_vector:
      if (plant.kind != PlantKind::vector) throw ConfigError("attack.kind ls_vector needs a vector plant");
      break;
    case AttackKind::gp:
      if (plant.kind == PlantKind::vector) throw ConfigError("attack.kind gp needs a scalar plant");
      attack.kernel.validate();
      break;
    case AttackKind::replay: break;
  }
  if (attacked()) {
    const std::size_t min_l = attack.kind == AttackKind::replay ? 1 : 2;
    if (attack.learning < min_l) {
      throw ConfigError("attack.learning_length must be >= " + std::to_string(min_l));
    }
    if (attack.learning >= detector.test_time) {
      throw ConfigError("attack.learning_length (" + std::to_string(attack.learning) +
                        ") must be below detector.test_time (" +
                        std::to_string(detector.test_time) + ")");
    }
    if (attack.kind == AttackKind::gp && attack.learning - 1 > attack::kMaxGpPoints) {
      throw ConfigError("attack.learning_length exceeds the GP learning-set limit");
    }
  }
  if (!(bounds.zeta > 0.0)) throw ConfigError("bounds.zeta must be > 0");
  if (bounds.rho && !(*bounds.rho >= 0.0 && *bounds.rho <= 1.0)) {
    throw ConfigError("bounds.rho must lie in [0, 1]");
  }
  if (bounds.beta && !(*bounds.beta > 0.0)) throw ConfigError("bounds.beta must be > 0");
  if (sweep.trials < 1) throw ConfigError("sweep.trials must be >= 1");
  if (sweep.threads < 1) throw ConfigError("sweep.threads must be >= 1");
  if (!sweep.axis.empty() && sweep.values.empty()) throw ConfigError("sweep.values is empty");
}

ExperimentConfig build_experiment(const KeyValueConfig& kv) {
  for (const auto& [key, value] : kv.values()) {
    if (!known_keys().count(key)) {
      throw ConfigError(kv.origin() + ": unknown key '" + key + "'");
    }
  }
  if (kv.has("schema_version")) {
    const auto v = kv.get_size("schema_version", 0);
    if (v != static_cast<std::size_t>(kSchemaVersion)) {
      throw ConfigError("unsupported schema_version " + std::to_string(v));
    }
  }

  ExperimentConfig cfg;
  cfg.plant = build_plant(kv);
  cfg.controller = build_controller(kv);
  cfg.attack = build_attack(kv, cfg.plant.kind);

  const std::string test = kv.get_string(
      "detector.test", cfg.plant.kind == PlantKind::vector ? "covariance" : "variance");
  if (test == "variance") {
    cfg.detector.test = TestKind::variance;
  } else if (test == "covariance") {
    cfg.detector.test = TestKind::covariance;
  } else {
    throw ConfigError("unknown detector.test '" + test + "'");
  }
  cfg.detector.tolerance = kv.get_double("detector.tolerance", 0.1);
  cfg.detector.test_time = kv.get_size("detector.test_time", 0);

  if (auto v = kv.find_double("bounds.beta")) cfg.bounds.beta = *v;
  cfg.bounds.zeta = kv.get_double("bounds.zeta", 0.5);
  if (auto v = kv.find_double("bounds.rho")) cfg.bounds.rho = *v;
  if (kv.has("bounds.horizon_gap")) cfg.bounds.horizon_gap = kv.get_size("bounds.horizon_gap", 0);

  cfg.sweep.axis = kv.get_string("sweep.axis", "");
  if (!cfg.sweep.axis.empty()) {
    if (!known_keys().count(cfg.sweep.axis) || cfg.sweep.axis.rfind("sweep.", 0) == 0) {
      throw ConfigError("sweep.axis '" + cfg.sweep.axis + "' is not a sweepable key");
    }
    cfg.sweep.values = kv.get_list("sweep.values");
  }
  cfg.sweep.trials = kv.get_size("sweep.trials", 100);
  cfg.sweep.seed = kv.get_u64("sweep.seed", 1);
  cfg.sweep.threads = kv.get_size("sweep.threads", 1);

  cfg.hash = config_hash(kv);
  cfg.validate();
  return cfg;
}

KeyValueConfig with_axis_value(const KeyValueConfig& kv, const std::string& axis, double value) {
  KeyValueConfig out = kv;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out.set(axis, buf);
  return out;
}

}  // namespace lba::harness
