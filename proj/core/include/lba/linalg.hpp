#pragma once

#include <Eigen/Dense>

namespace lba {

/// Real symmetric matrix. Construction checks symmetry and stores the exact
/// symmetric part, so eigenvalues are always real.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Eigen::MatrixXd& m);

  static SymmetricMatrix identity(Eigen::Index n);
  static SymmetricMatrix zero(Eigen::Index n);
  static SymmetricMatrix diagonal(const Eigen::VectorXd& d);
  static SymmetricMatrix scalar(double v) { return diagonal(Eigen::VectorXd::Constant(1, v)); }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXd m_;
};

/// Loewner/PSD tolerance: 1e-9 * (1 + |trace|).
double psd_tolerance(double trace_magnitude) noexcept;

bool is_psd(const SymmetricMatrix& a);

/// A ⪰ B, i.e. min eig(A - B) >= -psd_tolerance(max(|tr A|, |tr B|)).
bool loewner_geq(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Largest singular value, via the eigenvalues of the smaller Gram product.
double operator_norm(const Eigen::MatrixXd& m);

}  // namespace lba
