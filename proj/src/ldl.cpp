#include "pdqp/ldl.hpp"

#include <cmath>
#include <utility>

namespace pdqp {

namespace {

// Symmetric swap of rows/columns a < b of a lower-stored matrix. Columns
// before `a` hold finished L multipliers and are swapped as rows.
void swap_sym(Matrix& W, Index a, Index b) {
  const Index n = W.rows();
  for (Index j = 0; j < a; ++j) std::swap(W(a, j), W(b, j));
  std::swap(W(a, a), W(b, b));
  for (Index j = a + 1; j < b; ++j) std::swap(W(j, a), W(b, j));
  for (Index i = b + 1; i < n; ++i) std::swap(W(i, a), W(i, b));
}

}  // namespace

double inf_norm(const Matrix& K) {
  return K.size() ? K.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
}

std::optional<LdlFactor> LdlFactor::factor(const Matrix& K, double tol, Failure* failure) {
  const Index n = K.rows();
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  LdlFactor f;
  f.LD_ = K;
  f.perm_.resize(static_cast<size_t>(n));
  f.block_.assign(static_cast<size_t>(n), 1);
  for (Index i = 0; i < n; ++i) f.perm_[static_cast<size_t>(i)] = i;
  Matrix& W = f.LD_;

  Index k = 0;
  while (k < n) {
    const double akk = std::abs(W(k, k));
    Index imax = k;
    double colmax = 0;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(W(i, k)) > colmax) {
        colmax = std::abs(W(i, k));
        imax = i;
      }
    }
    if (std::max(akk, colmax) <= tol) {
      if (failure) failure->step = k;
      return std::nullopt;
    }
    Index kp = k;
    int step = 1;
    if (akk < alpha * colmax) {
      double rowmax = 0;
      for (Index j = k; j < imax; ++j) rowmax = std::max(rowmax, std::abs(W(imax, j)));
      for (Index j = imax + 1; j < n; ++j) rowmax = std::max(rowmax, std::abs(W(j, imax)));
      if (akk * rowmax >= alpha * colmax * colmax) {
        kp = k;
      } else if (std::abs(W(imax, imax)) >= alpha * rowmax) {
        kp = imax;
      } else {
        kp = imax;
        step = 2;
      }
    }
    const Index kk = k + step - 1;
    if (kp != kk) {
      swap_sym(W, kk, kp);
      std::swap(f.perm_[static_cast<size_t>(kk)], f.perm_[static_cast<size_t>(kp)]);
    }

    const Index rest = n - k - step;
    if (step == 1) {
      const double d = W(k, k);
      if (std::abs(d) <= tol) {
        if (failure) failure->step = k;
        return std::nullopt;
      }
      for (Index j = k + 1; j < n; ++j) {
        const double coef = W(j, k) / d;
        if (coef != 0) W.col(j).segment(j, n - j) -= coef * W.col(k).segment(j, n - j);
      }
      W.col(k).tail(rest) /= d;
    } else {
      const double d11 = W(k, k), d21 = W(k + 1, k), d22 = W(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      if (std::abs(det) <= tol * std::abs(d21)) {
        if (failure) failure->step = k;
        return std::nullopt;
      }
      const double i11 = d22 / det, i21 = -d21 / det, i22 = d11 / det;
      Vector w1 = W.col(k).tail(rest), w2 = W.col(k + 1).tail(rest);
      Vector l1 = w1 * i11 + w2 * i21;
      Vector l2 = w1 * i21 + w2 * i22;
      for (Index t = 0; t < rest; ++t) {
        const Index j = k + 2 + t;
        W.col(j).segment(j, n - j) -=
            w1[t] * l1.segment(t, rest - t) + w2[t] * l2.segment(t, rest - t);
      }
      W.col(k).tail(rest) = l1;
      W.col(k + 1).tail(rest) = l2;
      f.block_[static_cast<size_t>(k)] = 2;
      f.block_[static_cast<size_t>(k + 1)] = 0;
    }
    k += step;
  }
  return f;
}

Vector LdlFactor::solve(const Vector& rhs) const {
  const Index n = dim();
  Vector u(n);
  for (Index i = 0; i < n; ++i) u[i] = rhs[perm_[static_cast<size_t>(i)]];
  // L u' = u
  for (Index k = 0; k < n;) {
    const int b = block_[static_cast<size_t>(k)];
    if (b == 1) {
      u.tail(n - k - 1) -= u[k] * LD_.col(k).tail(n - k - 1);
      k += 1;
    } else {
      const Index rest = n - k - 2;
      u.tail(rest) -= u[k] * LD_.col(k).tail(rest) + u[k + 1] * LD_.col(k + 1).tail(rest);
      k += 2;
    }
  }
  // D
  for (Index k = 0; k < n;) {
    if (block_[static_cast<size_t>(k)] == 1) {
      u[k] /= LD_(k, k);
      k += 1;
    } else {
      const double d11 = LD_(k, k), d21 = LD_(k + 1, k), d22 = LD_(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      const double a = u[k], b = u[k + 1];
      u[k] = (d22 * a - d21 * b) / det;
      u[k + 1] = (d11 * b - d21 * a) / det;
      k += 2;
    }
  }
  // Lᵀ
  for (Index k = n - 1; k >= 0;) {
    if (k > 0 && block_[static_cast<size_t>(k)] == 0) {
      const Index s = k - 1, rest = n - k - 1;
      u[s] -= LD_.col(s).tail(rest).dot(u.tail(rest));
      u[k] -= LD_.col(k).tail(rest).dot(u.tail(rest));
      k -= 2;
    } else {
      u[k] -= LD_.col(k).tail(n - k - 1).dot(u.tail(n - k - 1));
      k -= 1;
    }
  }
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[perm_[static_cast<size_t>(i)]] = u[i];
  return x;
}

Index LdlFactor::negative_eigenvalues() const {
  Index neg = 0;
  for (Index k = 0; k < dim();) {
    if (block_[static_cast<size_t>(k)] == 1) {
      if (LD_(k, k) < 0) ++neg;
      k += 1;
    } else {
      const double det = LD_(k, k) * LD_(k + 1, k + 1) - LD_(k + 1, k) * LD_(k + 1, k);
      if (det < 0) {
        ++neg;
      } else if (LD_(k, k) + LD_(k + 1, k + 1) < 0) {
        neg += 2;
      }
      k += 2;
    }
  }
  return neg;
}

}  // namespace pdqp
