#include "msdiar/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msdiar/random.hpp"

namespace msdiar {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::uint64_t u64(Eigen::Index v) { return static_cast<std::uint64_t>(v); }

}  // namespace

SymmetricTridiagonalization::SymmetricTridiagonalization(Matrix a, CostLedger* ledger) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw DimensionMismatchError("matrix must be square");
  diagonal_ = Vector::Zero(n);
  off_diagonal_ = Vector::Zero(n);
  betas_.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n, 1)), 0.0);

  Vector p;
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    const Eigen::Index m = n - i - 1;
    auto x = a.col(i).tail(m);
    const double sigma = x.tail(m - 1).squaredNorm();
    const double x0 = x(0);
    ops::eig(ledger, 2 * u64(m - 1));
    diagonal_(i) = a(i, i);
    if (sigma == 0.0) {
      off_diagonal_(i) = x0;
      betas_[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    const double mu = std::sqrt(x0 * x0 + sigma);
    const double alpha = x0 <= 0.0 ? mu : -mu;
    x(0) = x0 - alpha;
    const double beta = 2.0 / (x(0) * x(0) + sigma);
    off_diagonal_(i) = alpha;
    betas_[static_cast<std::size_t>(i)] = beta;
    ops::eig(ledger, 8);

    auto trailing = a.bottomRightCorner(m, m);
    p.resize(m);
    p.noalias() = beta * (trailing.selfadjointView<Eigen::Lower>() * x);
    const double k = 0.5 * beta * x.dot(p);
    p -= k * x;
    trailing.selfadjointView<Eigen::Lower>().rankUpdate(x, p, -1.0);
    // matvec, scaling, dot, axpy, rank-2 update of the lower triangle
    ops::eig(ledger, 2 * u64(m) * u64(m) + u64(m) + 2 * u64(m) + 3 + 2 * u64(m) +
                         2 * u64(m) * u64(m + 1));
  }
  if (n >= 2) {
    diagonal_(n - 2) = a(n - 2, n - 2);
    off_diagonal_(n - 2) = a(n - 1, n - 2);
  }
  if (n >= 1) diagonal_(n - 1) = a(n - 1, n - 1);
  reflectors_ = std::move(a);
}

Vector SymmetricTridiagonalization::eigenvalues(CostLedger* ledger) const {
  const Eigen::Index n = size();
  Vector d = diagonal_;
  Vector e = off_diagonal_;
  std::uint64_t count = 0;
  for (Eigen::Index l = 0; l < n; ++l) {
    int iter = 0;
    Eigen::Index m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        count += 3;
        if (std::abs(e(m)) <= kEps * dd) break;
      }
      if (m == l) break;
      if (iter++ == kMaxQlIterations) {
        throw NumericalError("QL iteration did not converge");
      }
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = std::hypot(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      count += 12;
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool deflated = false;
      for (Eigen::Index i = m - 1; i >= l; --i) {
        const double f = s * e(i);
        const double b = c * e(i);
        r = std::hypot(f, g);
        e(i + 1) = r;
        count += 7;
        if (r == 0.0) {
          d(i + 1) -= p;
          e(m) = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + 2.0 * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        count += 13;
      }
      if (deflated) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0.0;
      count += 1;
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  count += u64(n) * static_cast<std::uint64_t>(std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(n)))));
  ops::eig(ledger, count);
  return d;
}

void SymmetricTridiagonalization::apply_q(Eigen::Ref<Vector> y, CostLedger* ledger) const {
  const Eigen::Index n = size();
  for (Eigen::Index i = n - 3; i >= 0; --i) {
    const double beta = betas_[static_cast<std::size_t>(i)];
    if (beta == 0.0) continue;
    const Eigen::Index m = n - i - 1;
    auto v = reflectors_.col(i).tail(m);
    const double s = beta * v.dot(y.tail(m));
    y.tail(m) -= s * v;
    ops::eig(ledger, 4 * u64(m) + 1);
  }
}

Matrix SymmetricTridiagonalization::eigenvectors(const Vector& eigenvalues,
                                                 Eigen::Index count,
                                                 CostLedger* ledger) const {
  const Eigen::Index n = size();
  count = std::min(count, n);
  Matrix out(n, count);
  if (count == 0) return out;
  const Vector& d = diagonal_;
  const Vector& e = off_diagonal_;

  double norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = std::abs(d(i));
    if (i > 0) row += std::abs(e(i - 1));
    if (i + 1 < n) row += std::abs(e(i));
    norm = std::max(norm, row);
  }
  const double scale = norm > 0.0 ? norm : 1.0;
  const double ortol = 1e-3 * scale;
  const double pertol = 10.0 * kEps * scale;
  const double tiny_pivot = kEps * scale;

  // LU of (T - sigma I) with partial pivoting. Row i of U holds
  // u0 (diagonal), u1, u2 (superdiagonals).
  std::vector<double> u0(static_cast<std::size_t>(n)), u1(static_cast<std::size_t>(n)),
      u2(static_cast<std::size_t>(n)), mult(static_cast<std::size_t>(n));
  std::vector<char> swapped(static_cast<std::size_t>(n));
  std::uint64_t count_ops = 0;

  // A singular pivot is replaced by eps * ||T||, which is what makes
  // inverse iteration converge in a couple of steps.
  auto clamp_pivot = [&](double pivot) {
    if (std::abs(pivot) >= tiny_pivot) return pivot;
    return pivot < 0.0 ? -tiny_pivot : tiny_pivot;
  };

  auto factor = [&](double sigma) {
    double cur_d = d(0) - sigma;
    double cur_u1 = n > 1 ? e(0) : 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double sub = e(i);
      const double diag = d(i + 1) - sigma;
      const double sup = i + 2 < n ? e(i + 1) : 0.0;
      if (std::abs(cur_d) >= std::abs(sub)) {
        const double pivot = clamp_pivot(cur_d);
        const double m = sub / pivot;
        u0[k] = pivot;
        u1[k] = cur_u1;
        u2[k] = 0.0;
        mult[k] = m;
        swapped[k] = 0;
        cur_d = diag - m * cur_u1;
        cur_u1 = sup;
      } else {
        const double m = cur_d / sub;
        u0[k] = sub;
        u1[k] = diag;
        u2[k] = sup;
        mult[k] = m;
        swapped[k] = 1;
        cur_d = cur_u1 - m * diag;
        cur_u1 = -m * sup;
      }
      count_ops += 6;
    }
    u0[static_cast<std::size_t>(n - 1)] = clamp_pivot(cur_d);
    u1[static_cast<std::size_t>(n - 1)] = 0.0;
    u2[static_cast<std::size_t>(n - 1)] = 0.0;
    count_ops += 2 * u64(n);
  };

  auto solve = [&](Vector& b) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (swapped[k]) std::swap(b(i), b(i + 1));
      b(i + 1) -= mult[k] * b(i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const auto k = static_cast<std::size_t>(i);
      double acc = b(i);
      if (i + 1 < n) acc -= u1[k] * b(i + 1);
      if (i + 2 < n) acc -= u2[k] * b(i + 2);
      b(i) = acc / u0[k];
    }
    count_ops += 2 * u64(n) + 5 * u64(n);
  };

  Matrix local(n, count);
  Eigen::Index group_start = 0;
  double prev_sigma = 0.0;
  for (Eigen::Index j = 0; j < count; ++j) {
    double sigma = eigenvalues(j);
    if (j > 0) {
      if (eigenvalues(j) - eigenvalues(j - 1) > ortol) group_start = j;
      if (sigma - prev_sigma < pertol) sigma = prev_sigma + pertol;
    }
    prev_sigma = sigma;
    factor(sigma);

    Rng rng(mix_seed(0x5eed, static_cast<std::uint64_t>(j)));
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.uniform() - 0.5;
    for (int iter = 0; iter < kInverseIterations; ++iter) {
      x /= x.cwiseAbs().maxCoeff();
      solve(x);
      for (Eigen::Index g = group_start; g < j; ++g) {
        x -= local.col(g).dot(x) * local.col(g);
      }
      count_ops += 4 * u64(n) * u64(j - group_start);
      const double nrm = x.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw NumericalError("inverse iteration broke down");
      }
      x /= nrm;
      count_ops += 5 * u64(n);
    }
    local.col(j) = x;
  }
  ops::eig(ledger, count_ops);

  for (Eigen::Index j = 0; j < count; ++j) {
    Vector y = local.col(j);
    apply_q(y, ledger);
    out.col(j) = y;
  }
  return out;
}

SymmetricEigenpairs symmetric_eigen(const Matrix& a, Eigen::Index count,
                                    CostLedger* ledger) {
  SymmetricTridiagonalization tri(a, ledger);
  SymmetricEigenpairs out;
  out.values = tri.eigenvalues(ledger);
  out.vectors = tri.eigenvectors(out.values, count, ledger);
  return out;
}

std::uint64_t eigen_cost_bound(std::size_t n, std::size_t count) {
  const std::uint64_t N = n;
  const std::uint64_t K = std::min(n, count);
  // Householder: per column at most 4m^2 + 9m + 11.
  std::uint64_t tri = 0;
  for (std::uint64_t m = 1; m <= N; ++m) tri += 4 * m * m + 9 * m + 11;
  // QL: per sweep a convergence scan of 3n plus 20 per rotation, at most
  // kMaxQlIterations + 1 sweeps per eigenvalue.
  const std::uint64_t sweeps = static_cast<std::uint64_t>(
      SymmetricTridiagonalization::kMaxQlIterations + 1);
  const std::uint64_t ql = N * sweeps * (3 * N + 20 * N + 13) + N * 64;
  const std::uint64_t iters = SymmetricTridiagonalization::kInverseIterations;
  const std::uint64_t inverse = K * (8 * N + iters * (7 * N + 4 * N * K + 5 * N));
  const std::uint64_t back = K * N * (4 * N + 1);
  return tri + ql + inverse + back;
}

}  // namespace msdiar
