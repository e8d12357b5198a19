#pragma once

// Fixed-step explicit integration (RK4 or Euler) with decimated recording.
//
// The closed loops contain a signum term, so there is no step-size control:
// the discontinuity is sampled at every stage with sgn(0) = 0. Two runs with
// identical inputs produce identical traces bit for bit.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mastrack {

enum class Method { Rk4, Euler };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

struct IntegrationConfig {
  double t_end = 100.0;
  double dt = 1e-3;
  Method method = Method::Rk4;
  double sgn_smoothing_epsilon = 0.0;  // 0 = exact signum
  std::size_t record_stride = 1;

  friend bool operator==(const IntegrationConfig&, const IntegrationConfig&) = default;
};

inline constexpr double kMaxSteps = 1e8;

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const IntegrationConfig& config);

/// Number of fixed steps covering [0, t_end].
std::size_t step_count(const IntegrationConfig& config);

/// sgn(s) with sgn(0) = 0, or the boundary-layer s / (|s| + eps) for eps > 0.
struct Signum {
  double epsilon = 0.0;
  double operator()(double s) const noexcept {
    if (epsilon > 0.0) return s / (std::abs(s) + epsilon);
    return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
  }
};

/// Row-major table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<double> values;

  [[nodiscard]] std::size_t width() const noexcept { return columns.size(); }
  [[nodiscard]] std::size_t rows() const noexcept {
    return columns.empty() ? 0 : values.size() / columns.size();
  }
  [[nodiscard]] double at(std::size_t row, std::size_t col) const {
    return values[row * columns.size() + col];
  }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {values.data() + r * columns.size(), columns.size()};
  }
  /// Throws std::out_of_range for an unknown column.
  [[nodiscard]] std::size_t column(const std::string& name) const;
  [[nodiscard]] bool has_column(const std::string& name) const;
  [[nodiscard]] std::vector<double> column_values(const std::string& name) const;
};

struct TraceMetadata {
  std::string order;           // "first" / "second" / free-form for generic runs
  std::string scenario_digest;
  IntegrationConfig config;
};

struct SimTrace {
  std::vector<double> times;
  std::size_t state_dim = 0;
  std::vector<double> states;  // times.size() x state_dim, row-major
  Table derived;
  TraceMetadata metadata;

  [[nodiscard]] std::span<const double> state(std::size_t k) const {
    return {states.data() + k * state_dim, state_dim};
  }
};

/// dx/dt = rhs(t, x), written into `dxdt`.
using RhsFn = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

/// Fills one row of derived quantities for the current (t, x).
struct Recorder {
  std::vector<std::string> columns;
  std::function<void(double t, std::span<const double> x, std::span<double> row)> fill;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t step, std::size_t component)
      : std::runtime_error(what), step_(step), component_(component) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }
  [[nodiscard]] std::size_t component() const noexcept { return component_; }

 private:
  std::size_t step_;
  std::size_t component_;
};

/// Integrates from t = 0. Times are k*dt (not accumulated) and rows are
/// recorded for every k divisible by record_stride. Throws IntegrationError
/// on the first non-finite state component.
SimTrace integrate(const RhsFn& rhs, std::span<const double> x_init, const IntegrationConfig& config,
                   const Recorder& recorder = {});

}  // namespace mastrack
