#pragma once

#include <cstdint>
#include <vector>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

// Dense symmetric eigensolver:
//   1. Householder reduction to tridiagonal form, A = Q T Q^T.
//   2. Implicit-shift QL on T for all eigenvalues.
//   3. Inverse iteration on T for the requested eigenvectors, with
//      reorthogonalization inside clusters of close eigenvalues, then
//      back-transformation by Q.
// Every arithmetic operation is charged to CostLedger::eig_sweep_ops.
class SymmetricTridiagonalization {
 public:
  // Only the lower triangle of `a` is read.
  explicit SymmetricTridiagonalization(Matrix a, CostLedger* ledger = nullptr);

  Eigen::Index size() const { return diagonal_.size(); }
  const Vector& diagonal() const { return diagonal_; }
  // off_diagonal()[i] couples rows i and i+1; the last entry is zero.
  const Vector& off_diagonal() const { return off_diagonal_; }

  // All eigenvalues in ascending order. Throws NumericalError if QL
  // fails to converge within kMaxQlIterations per eigenvalue.
  Vector eigenvalues(CostLedger* ledger = nullptr) const;

  // Eigenvectors (as columns) for the first `count` entries of the
  // ascending `eigenvalues`.
  Matrix eigenvectors(const Vector& eigenvalues, Eigen::Index count,
                      CostLedger* ledger = nullptr) const;

  static constexpr int kMaxQlIterations = 60;
  static constexpr int kInverseIterations = 3;

 private:
  void apply_q(Eigen::Ref<Vector> y, CostLedger* ledger) const;

  Matrix reflectors_;  // Householder vectors below the diagonal
  std::vector<double> betas_;
  Vector diagonal_;
  Vector off_diagonal_;
};

struct SymmetricEigenpairs {
  Vector values;   // all eigenvalues, ascending
  Matrix vectors;  // n x count, column j pairs with values[j]
};

SymmetricEigenpairs symmetric_eigen(const Matrix& a, Eigen::Index count,
                                    CostLedger* ledger = nullptr);

// Worst-case eig_sweep_ops for an n x n problem with `count` eigenvectors.
std::uint64_t eigen_cost_bound(std::size_t n, std::size_t count);

}  // namespace msdiar
