#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "helpers.hpp"
#include "mastrack/graph.hpp"
#include "mastrack/linalg.hpp"

using namespace mastrack;
using linalg::Matrix;

namespace {

// P = integral of Phi^T Phi with Phi' = Q Phi, RK4 for Phi and composite Simpson.
Matrix lyapunov_by_fine_quadrature(const Matrix& q, double t_end, double h) {
  const std::size_t n = q.rows();
  Matrix phi = Matrix::identity(n);
  Matrix p(n, n);
  const auto steps = static_cast<int>(std::lround(t_end / h));
  auto integrand = [](const Matrix& m) { return m.transpose() * m; };
  p = p + (h / 3.0) * integrand(phi);
  for (int k = 1; k <= steps; ++k) {
    const Matrix k1 = q * phi;
    const Matrix k2 = q * (phi + (h / 2) * k1);
    const Matrix k3 = q * (phi + (h / 2) * k2);
    const Matrix k4 = q * (phi + h * k3);
    phi = phi + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double w = (k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    p = p + (w * h / 3.0) * integrand(phi);
  }
  return p;
}

std::vector<std::complex<double>> quadratic_roots(double b, double c) {
  const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4 * c, 0.0));
  return {0.5 * (-b + disc), 0.5 * (-b - disc)};
}

double match_spectrum(std::vector<std::complex<double>> got, const std::vector<std::complex<double>>& want) {
  double worst = 0.0;
  for (const auto& z : want) {
    auto best = std::min_element(got.begin(), got.end(),
                                 [&](auto a, auto b) { return std::abs(a - z) < std::abs(b - z); });
    worst = std::max(worst, std::abs(*best - z));
    got.erase(best);
  }
  return worst;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("matrix products and transposes") {
    const Matrix a{{1, 2}, {3, 4}};
    const Matrix b{{0, 1}, {1, 0}};
    CHECK(a * b == Matrix{{2, 1}, {4, 3}});
    CHECK(a.transpose() == Matrix{{1, 3}, {2, 4}});
    CHECK(a * std::vector<double>{1, 1} == std::vector<double>{3, 7});
    CHECK(linalg::norm2(std::vector<double>{3, 4}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(a * Matrix(3, 1), std::invalid_argument);
  }

  TEST_CASE("jacobi eigenvalues of a known symmetric matrix") {
    const Matrix a{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
    const auto eig = linalg::jacobi_eigen(a);
    CHECK(eig.values[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(eig.values[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-13));
    // A v = lambda v column by column
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t r = 0; r < 3; ++r) {
        double av = 0.0;
        for (std::size_t k = 0; k < 3; ++k) av += a(r, k) * eig.vectors(k, c);
        CHECK(av == doctest::Approx(eig.values[c] * eig.vectors(r, c)).epsilon(1e-12).scale(1.0));
      }
    CHECK_THROWS_AS(linalg::jacobi_eigen(Matrix{{1, 2}, {0, 1}}), std::invalid_argument);
  }

  TEST_CASE("general eigenvalues include complex pairs") {
    const Matrix rot{{0, -2}, {2, 0}};
    const auto z = linalg::general_eigenvalues(rot);
    CHECK(match_spectrum(z, {{0, 2}, {0, -2}}) < 1e-12);
    const Matrix upper{{1, 5, 7}, {0, -3, 2}, {0, 0, 4}};
    CHECK(match_spectrum(linalg::general_eigenvalues(upper), {1, -3, 4}) < 1e-12);
  }

  TEST_CASE("solve_linear and singular systems") {
    const auto x = linalg::solve_linear(Matrix{{0, 2}, {3, 1}}, {4, 5});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(linalg::solve_linear(Matrix{{1, 2}, {2, 4}}, {1, 2}), linalg::SingularMatrixError);
  }

  TEST_CASE("spectral norm") {
    CHECK(linalg::spectral_norm(Matrix{{3, 0}, {0, -5}}) == doctest::Approx(5.0));
    CHECK(linalg::spectral_norm(Matrix{{1, 1}, {0, 1}}) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
  }

  TEST_CASE("scalar Lyapunov equation") {
    const auto sol = linalg::solve_lyapunov(Matrix{{-1}});
    CHECK(sol.p(0, 0) == doctest::Approx(0.5));
    CHECK(sol.residual == 0.0);
  }

  TEST_CASE("Lyapunov solution of a companion matrix matches fine quadrature") {
    const Matrix q{{0, 1}, {-2, -1}};
    const auto sol = linalg::solve_lyapunov(q);
    CHECK(sol.residual <= 1e-9);
    CHECK(std::abs(sol.p(0, 1) - sol.p(1, 0)) <= 1e-12);
    const Matrix oracle = lyapunov_by_fine_quadrature(q, 60.0, 1e-3);
    CHECK((sol.p - oracle).max_abs() <= 1e-6);
    // closed form: P = [[1.75, 0.25], [0.25, 0.75]]
    CHECK(sol.p(0, 0) == doctest::Approx(1.75));
    CHECK(sol.p(0, 1) == doctest::Approx(0.25));
    CHECK(sol.p(1, 1) == doctest::Approx(0.75));
  }

  TEST_CASE("unstable matrices are rejected") {
    try {
      linalg::solve_lyapunov(Matrix{{1}});
      FAIL("expected LyapunovError");
    } catch (const linalg::LyapunovError& e) {
      CHECK(e.kind() == linalg::LyapunovError::Kind::NotHurwitz);
      CHECK(std::string(e.what()).find("not Hurwitz") != std::string::npos);
      CHECK(e.lambda_min_p() < 0.0);
    }
    // eigenvalues +i, -i: the vectorised system is singular
    CHECK_THROWS_AS(linalg::solve_lyapunov(Matrix{{0, 1}, {-1, 0}}), linalg::LyapunovError);
  }

  TEST_CASE("block assembly") {
    CHECK(linalg::assemble_q(linalg::BlockKind::Q1, Matrix{{2}}, 1.0, 0.5) == Matrix{{-2, 1}, {-2, 0}});
    const Matrix q2 = linalg::assemble_q(linalg::BlockKind::Q2, Matrix(2, 2), 1.0, 0.5);
    CHECK(q2 == Matrix{{-1, 0, 1, 0}, {0, -1, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}});
    CHECK(linalg::assemble_q(linalg::BlockKind::Q3, Matrix{{4}}, 1.0, 0.5) == Matrix{{0, 1}, {-2, -1}});
  }

  TEST_CASE("Q1 and Q3 spectra follow the per-eigenvalue quadratics") {
    const GraphMatrices g = build_matrices(testutil::five_cycle());
    std::vector<std::complex<double>> want1, want3;
    for (const double lam : g.h_eigenvalues) {
      for (const auto z : quadratic_roots(lam, lam)) want1.push_back(z);
      for (const auto z : quadratic_roots(1.0, 0.5 * lam)) want3.push_back(z);
    }
    const auto q1 = linalg::assemble_q(linalg::BlockKind::Q1, g.h, 1.0, 0.5);
    const auto q3 = linalg::assemble_q(linalg::BlockKind::Q3, g.h, 1.0, 0.5);
    CHECK(match_spectrum(linalg::general_eigenvalues(q1), want1) <= 1e-8);
    CHECK(match_spectrum(linalg::general_eigenvalues(q3), want3) <= 1e-8);
  }
}
