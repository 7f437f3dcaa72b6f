#include "lba/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lba/errors.hpp"

namespace lba {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("symmetric matrix must be square");
  }
  if (!m.allFinite()) {
    throw ContractViolation("symmetric matrix has non-finite entries");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "matrix is not symmetric (max |m_ij - m_ji| = " << asym << ")";
    throw ContractViolation(msg.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index n) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(n, n));
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index n) {
  return SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
}

SymmetricMatrix SymmetricMatrix::diagonal(const Eigen::VectorXd& d) {
  return SymmetricMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

Eigen::VectorXd SymmetricMatrix::eigenvalues() const {
  if (m_.size() == 0) return {};
  if (m_.rows() == 1) return m_.diagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double SymmetricMatrix::min_eigenvalue() const {
  const Eigen::VectorXd eig = eigenvalues();
  return eig.size() == 0 ? 0.0 : eig(0);
}

double psd_tolerance(double trace_magnitude) noexcept {
  return 1e-9 * (1.0 + std::abs(trace_magnitude));
}

bool is_psd(const SymmetricMatrix& a) {
  return a.min_eigenvalue() >= -psd_tolerance(a.trace());
}

bool loewner_geq(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("loewner_geq: dimensions " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()));
  }
  const SymmetricMatrix diff(a.matrix() - b.matrix());
  const double scale = std::max(std::abs(a.trace()), std::abs(b.trace()));
  return diff.min_eigenvalue() >= -psd_tolerance(scale);
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  const Eigen::MatrixXd gram =
      m.rows() >= m.cols() ? Eigen::MatrixXd(m.transpose() * m) : Eigen::MatrixXd(m * m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace lba
