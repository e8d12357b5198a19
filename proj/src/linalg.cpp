#include "mastrack/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mastrack::linalg {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const { return linalg::max_abs(data_); }

double Matrix::frobenius_norm() const { return norm2(data_); }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("Matrix sum: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw std::invalid_argument("Matrix-vector product: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double norm2(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------

namespace {

double off_diagonal_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input, double tolerance) {
  if (!input.square()) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  const std::size_t n = input.rows();
  const double scale = std::max(input.frobenius_norm(), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > 1e-10 * scale)
        throw std::invalid_argument("jacobi_eigen: matrix is not symmetric");

  Matrix a = input;
  Matrix v = Matrix::identity(n);
  int sweep = 0;
  constexpr int kMaxSweeps = 100;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tolerance * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw std::runtime_error("jacobi_eigen: no convergence");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  out.sweeps = sweep;
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Vector symmetric_eigenvalues(const Matrix& a) { return jacobi_eigen(a).values; }

// ---------------------------------------------------------------------------
// General eigenvalues: elimination to upper Hessenberg form followed by the
// Francis double-shift QR iteration. Indices below are 1-based to keep the
// deflation logic readable.

namespace {

void reduce_to_hessenberg(std::vector<std::vector<double>>& a, int n) {
  for (int m = 2; m < n; ++m) {
    double x = 0.0;
    int i = m;
    for (int j = m; j <= n; ++j) {
      if (std::abs(a[j][m - 1]) > std::abs(x)) {
        x = a[j][m - 1];
        i = j;
      }
    }
    if (i != m) {
      for (int j = m - 1; j <= n; ++j) std::swap(a[i][j], a[m][j]);
      for (int j = 1; j <= n; ++j) std::swap(a[j][i], a[j][m]);
    }
    if (x != 0.0) {
      for (i = m + 1; i <= n; ++i) {
        double y = a[i][m - 1];
        if (y != 0.0) {
          y /= x;
          a[i][m - 1] = y;
          for (int j = m; j <= n; ++j) a[i][j] -= y * a[m][j];
          for (int j = 1; j <= n; ++j) a[j][m] += y * a[j][i];
        }
      }
    }
  }
  for (int i = 3; i <= n; ++i)
    for (int j = 1; j < i - 1; ++j) a[i][j] = 0.0;
}

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

void hessenberg_qr(std::vector<std::vector<double>>& a, int n, std::vector<double>& wr,
                   std::vector<double>& wi) {
  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a[i][j]);

  int nn = n;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, w = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
        if (s == 0.0) s = anorm;
        if (std::abs(a[l][l - 1]) + s == s) {
          a[l][l - 1] = 0.0;
          break;
        }
      }
      if (l < 1) l = 1;
      x = a[nn][nn];
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        y = a[nn - 1][nn - 1];
        w = a[nn][nn - 1] * a[nn - 1][nn];
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -z;
            wi[nn] = z;
          }
          nn -= 2;
        } else {
          if (its == 60) throw std::runtime_error("general_eigenvalues: no convergence");
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 1; i <= nn; ++i) a[i][i] -= x;
            s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a[m][m];
            r = x - z;
            s = y - z;
            p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
            q = a[m + 1][m + 1] - z - r - s;
            r = a[m + 2][m + 1];
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a[m - 1][m - 1]) + std::abs(z) +
                                            std::abs(a[m + 1][m + 1]));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a[i][i - 2] = 0.0;
            if (i != m + 2) a[i][i - 3] = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a[k][k - 1];
              q = a[k + 1][k - 1];
              r = 0.0;
              if (k != nn - 1) r = a[k + 2][k - 1];
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a[k][k - 1] = -a[k][k - 1];
              } else {
                a[k][k - 1] = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a[k][j] + q * a[k + 1][j];
                if (k != nn - 1) {
                  p += r * a[k + 2][j];
                  a[k + 2][j] -= p * z;
                }
                a[k + 1][j] -= p * y;
                a[k][j] -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a[i][k] + y * a[i][k + 1];
                if (k != nn - 1) {
                  p += z * a[i][k + 2];
                  a[i][k + 2] -= p * r;
                }
                a[i][k + 1] -= p * q;
                a[i][k] -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

}  // namespace

std::vector<std::complex<double>> general_eigenvalues(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("general_eigenvalues: matrix is not square");
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i + 1][j + 1] = m(i, j);
  reduce_to_hessenberg(a, n);
  std::vector<double> wr(n + 1, 0.0), wi(n + 1, 0.0);
  hessenberg_qr(a, n, wr, wi);
  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

// ---------------------------------------------------------------------------

Vector solve_linear(Matrix a, Vector b) {
  if (!a.square() || a.rows() != b.size())
    throw std::invalid_argument("solve_linear: shape mismatch");
  const std::size_t n = a.rows();
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= 1e-12 * scale) {
      std::ostringstream msg;
      msg << "solve_linear: matrix is singular to working precision (column " << col << ")";
      throw SingularMatrixError(msg.str());
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) * inv;
      if (factor == 0.0) continue;
      a(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= factor * a(col, j);
      b[r] -= factor * b[col];
    }
  }
  Vector x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

double spectral_norm(const Matrix& a) {
  const Matrix gram = a.transpose() * a;
  const Vector ev = symmetric_eigenvalues(gram);
  return ev.empty() ? 0.0 : std::sqrt(std::max(ev.back(), 0.0));
}

// ---------------------------------------------------------------------------

LyapunovSolution solve_lyapunov(const Matrix& q) {
  if (!q.square()) throw std::invalid_argument("solve_lyapunov: Q is not square");
  const std::size_t n = q.rows();
  if (n > kMaxLyapunovOrder)
    throw LyapunovError(LyapunovError::Kind::TooLarge, "solve_lyapunov: order exceeds 64");

  // Column-major vec(P): unknown P(i,j) lives at i + j*n. Row (i,j) of the
  // system is sum_m Q(m,i) P(m,j) + sum_m P(i,m) Q(m,j) = -delta_ij.
  const std::size_t nn = n * n;
  Matrix k(nn, nn);
  Vector rhs(nn, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = i + j * n;
      for (std::size_t m = 0; m < n; ++m) {
        k(row, m + j * n) += q(m, i);
        k(row, i + m * n) += q(m, j);
      }
      if (i == j) rhs[row] = -1.0;
    }
  }

  Vector vec_p;
  try {
    vec_p = solve_linear(std::move(k), std::move(rhs));
  } catch (const SingularMatrixError&) {
    throw LyapunovError(LyapunovError::Kind::Singular, "Lyapunov equation singular");
  }

  LyapunovSolution sol;
  sol.p = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      sol.p(i, j) = 0.5 * (vec_p[i + j * n] + vec_p[j + i * n]);

  const Matrix res = sol.p * q + q.transpose() * sol.p + Matrix::identity(n);
  sol.residual = res.max_abs();

  const Vector ev = symmetric_eigenvalues(sol.p);
  sol.lambda_min_p = ev.front();
  sol.lambda_max_p = ev.back();
  if (!(sol.lambda_min_p > 0.0)) {
    std::ostringstream msg;
    msg << "Q not Hurwitz: Lyapunov solution is not positive definite (lambda_min(P) = "
        << sol.lambda_min_p << ")";
    throw LyapunovError(LyapunovError::Kind::NotHurwitz, msg.str(), sol.lambda_min_p);
  }
  sol.spectral_norm_p = spectral_norm(sol.p);
  return sol;
}

Matrix assemble_q(BlockKind kind, const Matrix& h, double l, double k) {
  if (!h.square()) throw std::invalid_argument("assemble_q: H is not square");
  const std::size_t n = h.rows();
  Matrix q(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case BlockKind::Q1:
        for (std::size_t j = 0; j < n; ++j) {
          q(i, j) = -h(i, j);
          q(n + i, j) = -h(i, j);
        }
        q(i, n + i) = 1.0;
        break;
      case BlockKind::Q2:
        q(i, i) = -l;
        q(i, n + i) = 1.0;
        q(n + i, i) = -l;
        break;
      case BlockKind::Q3:
        q(i, n + i) = 1.0;
        for (std::size_t j = 0; j < n; ++j) q(n + i, j) = -k * h(i, j);
        q(n + i, n + i) = -1.0;
        break;
    }
  }
  return q;
}

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::Q1: return "Q1";
    case BlockKind::Q2: return "Q2";
    case BlockKind::Q3: return "Q3";
  }
  return "?";
}

}  // namespace mastrack::linalg
