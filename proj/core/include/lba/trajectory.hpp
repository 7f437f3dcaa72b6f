#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lba {

/// Per-step record of one closed-loop run, indexed by time k = 0..N-1.
///
/// Index 0 holds the initial condition: controls[0] = 0 and
/// disturbances[0] = 0, and observations[0] mirrors states[0]. Observations
/// equal states at every unhijacked step.
class Trajectory {
 public:
  explicit Trajectory(Eigen::Index dim);

  /// Appends the initial condition X_0.
  void start(const Eigen::VectorXd& x0);
  /// Appends step k = size().
  void push(const Eigen::VectorXd& state, const Eigen::VectorXd& control,
            const Eigen::VectorXd& observation, const Eigen::VectorXd& disturbance,
            bool hijacked);

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return states_.size(); }

  const std::vector<Eigen::VectorXd>& states() const noexcept { return states_; }
  const std::vector<Eigen::VectorXd>& controls() const noexcept { return controls_; }
  const std::vector<Eigen::VectorXd>& observations() const noexcept { return observations_; }
  const std::vector<Eigen::VectorXd>& disturbances() const noexcept { return disturbances_; }
  const std::vector<bool>& hijacked() const noexcept { return hijacked_; }

  /// Θ over steps 1..horizon: true iff some observation differs from the state.
  bool tampered_through(std::size_t horizon) const;

 private:
  Eigen::Index dim_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<Eigen::VectorXd> controls_;
  std::vector<Eigen::VectorXd> observations_;
  std::vector<Eigen::VectorXd> disturbances_;
  std::vector<bool> hijacked_;
};

}  // namespace lba
