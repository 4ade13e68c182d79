#pragma once

// Small dense linear algebra: vectors are std::vector<double>, matrices are
// row-major and square or rectangular. Sizes here are tiny (n <= ~10), so
// nothing is blocked or vectorised.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace waz {

using Vec = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Vec operator*(const Matrix& a, std::span<const double> x);
Matrix operator*(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
Vec add(std::span<const double> a, std::span<const double> b);
Vec sub(std::span<const double> a, std::span<const double> b);
/// a + s*b
Vec axpy(std::span<const double> a, double s, std::span<const double> b);
Vec scaled(double s, std::span<const double> a);
bool all_finite(std::span<const double> a);

/// Maximum absolute row sum (infinity norm).
double max_row_norm(const Matrix& a);

/// Row-pivoted LU factors of a square matrix, packed in one matrix
/// (unit lower triangle below the diagonal, upper triangle on and above).
class LuFactors {
 public:
  /// Factorises `a`. Pivot magnitudes below `1e-12 * max_row_norm(a)` mark
  /// the matrix singular; `solve` then throws SingularJacobian.
  explicit LuFactors(const Matrix& a, double pivot_rel_threshold = 1e-12);

  bool singular() const noexcept { return singular_; }
  std::size_t size() const noexcept { return lu_.rows(); }

  /// Solves A x = b.
  Vec solve(std::span<const double> b) const;
  /// Solves A^T x = b with the same factors.
  Vec solve_transposed(std::span<const double> b) const;

 private:
  void require_nonsingular() const;

  Matrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_ = 0.0;
  bool singular_ = false;
};

/// x with A x = b. Throws Error{SingularJacobian} on a rank-deficient A.
Vec solve_linear(const Matrix& a, std::span<const double> b);

/// Spectral norm of A^{-1} (reciprocal of the smallest singular value of A).
/// Runs a Lanczos iteration on (A^T A)^{-1}, each step one solve with A^T and
/// one with A; at most 50 iterations, relative tolerance 1e-10.
double inverse_spectral_norm(const Matrix& a);

}  // namespace waz
