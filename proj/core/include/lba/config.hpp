#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lba/attacker.hpp"
#include "lba/controller.hpp"
#include "lba/detector.hpp"
#include "lba/gp.hpp"
#include "lba/linalg.hpp"
#include "lba/plant.hpp"

namespace lba::harness {

inline constexpr int kSchemaVersion = 1;

/// Flat view of a config file: "section.key" -> raw value string.
///
/// Grammar (one item per line):
///   # comment           ; also after a value
///   [section]
///   key = value
/// Lists are whitespace/comma separated; matrix rows are separated by ';'.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void erase(const std::string& key) { values_.erase(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> find_double(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  Eigen::MatrixXd get_matrix(const std::string& key) const;

  /// Sorted "key = value" lines; the input of the config hash.
  std::string canonical() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  const std::string& origin() const noexcept { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// 16 hex digits of FNV-1a over the canonical text.
std::string config_hash(const KeyValueConfig& cfg);

enum class PlantKind { scalar, vector, nonlinear };
enum class AttackKind { none, ls_scalar, ls_vector, gp, replay };
enum class TestKind { variance, covariance };

struct PlantSpec {
  PlantKind kind = PlantKind::scalar;
  plant::ScalarPlant scalar;
  plant::VectorPlant vector;
  plant::NonlinearPlant nonlinear;
  plant::GainPrior prior;
  /// Variance override for the disturbance during the learning phase.
  std::optional<double> learning_noise_var;
  bool x0_defaulted = true;

  Eigen::Index dim() const;
};

struct ControllerSpec {
  control::ControlPolicy policy;
  control::PrivacySignalSpec privacy;
  control::LQWeights weights;
  bool depends_on_gain = false;
};

struct AttackSpec {
  AttackKind kind = AttackKind::none;
  std::size_t learning = 0;  // L
  attack::MaliciousActuation malicious;
  attack::SumKernel kernel;
  bool gp_standardize = true;
};

struct DetectorSpec {
  TestKind test = TestKind::variance;
  double tolerance = 0.1;  // δ or γ
  std::size_t test_time = 1;
};

/// Optional overrides for the bound evaluations.
struct BoundSpec {
  std::optional<double> beta;
  double zeta = 0.5;
  std::optional<double> rho;
  std::optional<std::size_t> horizon_gap;  // c; defaults to T - L
};

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ExperimentConfig {
  PlantSpec plant;
  ControllerSpec controller;
  AttackSpec attack;
  DetectorSpec detector;
  BoundSpec bounds;
  SweepSpec sweep;
  std::string hash;

  bool attacked() const noexcept { return attack.kind != AttackKind::none; }
  /// Throws ConfigError when cross-field invariants fail (L < T, matching
  /// dimensions, test kind vs plant kind, ...).
  void validate() const;
};

/// Builds and validates an experiment; throws ConfigError on unknown keys,
/// unknown registry names or malformed values.
ExperimentConfig build_experiment(const KeyValueConfig& kv);

/// Returns a copy of kv with `axis` set to `value`.
KeyValueConfig with_axis_value(const KeyValueConfig& kv, const std::string& axis, double value);

std::string to_string(AttackKind kind);

}  // namespace lba::harness
