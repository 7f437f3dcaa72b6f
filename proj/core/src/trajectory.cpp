#include "lba/trajectory.hpp"

#include "lba/errors.hpp"

namespace lba {

Trajectory::Trajectory(Eigen::Index dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("trajectory dimension must be at least 1");
}

void Trajectory::start(const Eigen::VectorXd& x0) {
  if (!states_.empty()) throw ContractViolation("trajectory already started");
  if (x0.size() != dim_) throw DimensionError("trajectory: initial state has wrong dimension");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim_);
  states_.push_back(x0);
  controls_.push_back(zero);
  observations_.push_back(x0);
  disturbances_.push_back(zero);
  hijacked_.push_back(false);
}

void Trajectory::push(const Eigen::VectorXd& state, const Eigen::VectorXd& control,
                      const Eigen::VectorXd& observation, const Eigen::VectorXd& disturbance,
                      bool hijacked) {
  if (states_.empty()) throw ContractViolation("trajectory: push before start");
  if (state.size() != dim_ || control.size() != dim_ || observation.size() != dim_ ||
      disturbance.size() != dim_) {
    throw DimensionError("trajectory: step vectors must all have dimension " +
                         std::to_string(dim_));
  }
  states_.push_back(state);
  controls_.push_back(control);
  observations_.push_back(observation);
  disturbances_.push_back(disturbance);
  hijacked_.push_back(hijacked);
}

bool Trajectory::tampered_through(std::size_t horizon) const {
  for (std::size_t k = 1; k <= horizon && k < states_.size(); ++k) {
    if (observations_[k] != states_[k]) return true;
  }
  return false;
}

}  // namespace lba
