#pragma once

// Small dense linear algebra kernels: symmetric eigenvalues (cyclic Jacobi),
// general eigenvalues (Hessenberg + shifted QR), partial-pivot linear solve,
// spectral norm, and the continuous Lyapunov equation Q^T P + P Q = -I.
//
// Everything here is sized for desk-scale problems (n up to a few tens).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mastrack::linalg {

using Vector = std::vector<double>;

/// Row-major dense matrix with value semantics.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  [[nodiscard]] Matrix transpose() const;
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, std::span<const double> x);

double norm2(std::span<const double> x);
double max_abs(std::span<const double> x);

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending,
/// eigenvectors stored column-wise in the same order.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm is
/// below `tolerance` relative to the matrix scale. Throws
/// std::invalid_argument when `a` is not square or not symmetric.
SymmetricEigen jacobi_eigen(const Matrix& a, double tolerance = 1e-12);

/// Eigenvalues only, ascending.
Vector symmetric_eigenvalues(const Matrix& a);

/// Eigenvalues of a general real matrix (unordered).
std::vector<std::complex<double>> general_eigenvalues(const Matrix& a);

/// Solves a x = b by Gaussian elimination with partial pivoting.
Vector solve_linear(Matrix a, Vector b);

/// Largest singular value, sqrt(lambda_max(A^T A)) via the symmetric path.
double spectral_norm(const Matrix& a);

// ---------------------------------------------------------------------------
// Lyapunov equation

class LyapunovError : public std::runtime_error {
 public:
  enum class Kind { Singular, NotHurwitz, TooLarge };
  LyapunovError(Kind kind, const std::string& what, double lambda_min_p = 0.0)
      : std::runtime_error(what), kind_(kind), lambda_min_p_(lambda_min_p) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// Smallest eigenvalue of the (indefinite) symmetric solution, when one exists.
  [[nodiscard]] double lambda_min_p() const noexcept { return lambda_min_p_; }

 private:
  Kind kind_;
  double lambda_min_p_;
};

struct LyapunovSolution {
  Matrix p;
  double lambda_min_p = 0.0;
  double lambda_max_p = 0.0;
  double spectral_norm_p = 0.0;
  double residual = 0.0;  // max |P Q + Q^T P + I|
};

inline constexpr std::size_t kMaxLyapunovOrder = 64;

/// Solves Q^T P + P Q = -I by Kronecker vectorisation. Throws LyapunovError
/// when the vectorised system is singular or P is not positive definite.
LyapunovSolution solve_lyapunov(const Matrix& q);

/// Block matrices of the second-order error systems.
///   Q1 = [[-H, I], [-H, 0]]
///   Q2 = [[-l I, I], [-l I, 0]]
///   Q3 = [[0, I], [-k H, -I]]
enum class BlockKind { Q1, Q2, Q3 };

Matrix assemble_q(BlockKind kind, const Matrix& h, double l, double k);

const char* to_string(BlockKind kind);

}  // namespace mastrack::linalg
