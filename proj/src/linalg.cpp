#include "waz/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "waz/error.hpp"

namespace waz {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorKind::InvalidArgument, "ragged matrix initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const { return waz::all_finite(data_); }

Vec operator*(const Matrix& a, std::span<const double> x) {
  Vec y(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  // hypot-style scaling keeps tiny and huge entries from under/overflowing.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) {
    const double q = v / scale;
    s += q * q;
  }
  return scale * std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  return norm(sub(a, b));
}

Vec add(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec axpy(std::span<const double> a, double s, std::span<const double> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

Vec scaled(double s, std::span<const double> a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

double max_row_norm(const Matrix& a) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (double v : a.row(r)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

LuFactors::LuFactors(const Matrix& a, double pivot_rel_threshold)
    : lu_(a), perm_(a.rows()) {
  if (!a.square()) throw Error(ErrorKind::InvalidArgument, "LU of a non-square matrix");
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "LU of a matrix with non-finite entries");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  const double threshold = pivot_rel_threshold * max_row_norm(a);
  min_pivot_ = n == 0 ? 0.0 : std::abs(a(0, 0));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(lu_(r, k)) > std::abs(lu_(p, k))) p = r;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
      std::swap(perm_[k], perm_[p]);
    }
    const double pivot = lu_(k, k);
    min_pivot_ = k == 0 ? std::abs(pivot) : std::min(min_pivot_, std::abs(pivot));
    if (std::abs(pivot) <= threshold || pivot == 0.0) {
      singular_ = true;
      return;
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double l = lu_(r, k) / pivot;
      lu_(r, k) = l;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= l * lu_(k, c);
    }
  }
}

void LuFactors::require_nonsingular() const {
  if (singular_) {
    throw Error(ErrorKind::SingularJacobian, "matrix is singular to working precision");
  }
}

Vec LuFactors::solve(std::span<const double> b) const {
  require_nonsingular();
  const std::size_t n = size();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Vec LuFactors::solve_transposed(std::span<const double> b) const {
  // P A = L U  =>  A^T = U^T L^T P, so solve U^T z = b, L^T w = z, x = P^T w.
  require_nonsingular();
  const std::size_t n = size();
  Vec z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = z[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * z[j];
    z[i] = s / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * z[j];
    z[i] = s;
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
  return x;
}

Vec solve_linear(const Matrix& a, std::span<const double> b) {
  if (b.size() != a.rows()) throw Error(ErrorKind::InvalidArgument, "rhs size mismatch");
  return LuFactors(a).solve(b);
}

namespace {

// Largest eigenpair of a small symmetric matrix by cyclic Jacobi rotations.
// Returns (eigenvalue, eigenvector).
std::pair<double, Vec> largest_symmetric_eigen(Matrix s) {
  const std::size_t n = s.rows();
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += s(i, i) * s(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    }
    if (off <= 1e-32 * diag || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (s(i, i) > s(best, best)) best = i;
  Vec vec(n);
  for (std::size_t k = 0; k < n; ++k) vec[k] = v(k, best);
  return {s(best, best), vec};
}

}  // namespace

double inverse_spectral_norm(const Matrix& a) {
  constexpr std::size_t kMaxIterations = 50;
  constexpr double kRelTol = 1e-10;

  const LuFactors lu(a);
  if (lu.singular()) {
    throw Error(ErrorKind::SingularJacobian, "inverse norm of a singular matrix");
  }
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;
  const auto apply = [&](std::span<const double> v) { return lu.solve(lu.solve_transposed(v)); };

  // Deterministic start vector with no zero components.
  Vec q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = 1.0 + 0.1 * static_cast<double>(i + 1) / static_cast<double>(n);
  {
    const double qn = norm(q);
    for (double& v : q) v /= qn;
  }

  std::vector<Vec> basis;
  std::vector<double> alpha, beta;
  double theta = 0.0;
  const std::size_t limit = std::min(n, kMaxIterations);
  for (std::size_t k = 0; k < limit; ++k) {
    basis.push_back(q);
    Vec w = apply(q);
    alpha.push_back(dot(w, q));
    // Full reorthogonalisation (twice) against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) {
        const double c = dot(w, b);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
      }
    const double b_next = norm(w);

    const std::size_t m = alpha.size();
    Matrix t(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    auto [value, vec] = largest_symmetric_eigen(t);
    theta = value;
    const double ritz_residual = b_next * std::abs(vec.back());
    if (ritz_residual <= kRelTol * std::abs(theta) || m == limit) break;

    if (b_next <= kRelTol * std::abs(theta)) {
      // Invariant subspace found; continue with a fresh direction orthogonal
      // to the basis so the Krylov space still fills R^n.
      Vec fresh;
      double best = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const Vec& b : basis) {
            const double c = dot(e, b);
            for (std::size_t i = 0; i < n; ++i) e[i] -= c * b[i];
          }
        const double en = norm(e);
        if (en > best) {
          best = en;
          fresh = std::move(e);
        }
      }
      for (double& v : fresh) v /= best;
      beta.push_back(0.0);
      q = std::move(fresh);
    } else {
      beta.push_back(b_next);
      for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b_next;
    }
  }
  return std::sqrt(std::max(theta, 0.0));
}

}  // namespace waz
