#include "mastrack/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mastrack {

const char* to_string(Method m) {
  switch (m) {
    case Method::Rk4: return "rk4";
    case Method::Euler: return "euler";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "rk4") return Method::Rk4;
  if (name == "euler") return Method::Euler;
  throw std::invalid_argument("unknown integration method '" + name + "' (expected rk4 or euler)");
}

void validate(const IntegrationConfig& c) {
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end))
    throw std::invalid_argument("integration: t_end must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt))
    throw std::invalid_argument("integration: dt must be positive");
  if (c.dt > c.t_end) throw std::invalid_argument("integration: dt exceeds t_end");
  if (c.t_end / c.dt > kMaxSteps) throw std::invalid_argument("integration: more than 1e8 steps");
  if (!(c.sgn_smoothing_epsilon >= 0.0))
    throw std::invalid_argument("integration: sgn_smoothing_epsilon must be >= 0");
  if (c.record_stride == 0) throw std::invalid_argument("integration: record_stride must be >= 1");
}

std::size_t step_count(const IntegrationConfig& c) {
  return static_cast<std::size_t>(std::llround(c.t_end / c.dt));
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool Table::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> Table::column_values(const std::string& name) const {
  const auto c = column(name);
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
  return out;
}

namespace {

void check_finite(std::span<const double> x, std::size_t step) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      std::ostringstream msg;
      msg << "integration: non-finite state at step " << step << ", component " << i;
      throw IntegrationError(msg.str(), step, i);
    }
  }
}

}  // namespace

SimTrace integrate(const RhsFn& rhs, std::span<const double> x_init, const IntegrationConfig& config,
                   const Recorder& recorder) {
  validate(config);
  const std::size_t dim = x_init.size();
  const std::size_t steps = step_count(config);
  const double dt = config.dt;

  SimTrace trace;
  trace.state_dim = dim;
  trace.metadata.config = config;
  trace.derived.columns = recorder.columns;
  const std::size_t expected_rows = steps / config.record_stride + 1;
  trace.times.reserve(expected_rows);
  trace.states.reserve(expected_rows * dim);
  trace.derived.values.reserve(expected_rows * recorder.columns.size());

  std::vector<double> x(x_init.begin(), x_init.end());
  check_finite(x, 0);
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  std::vector<double> row(recorder.columns.size());

  auto record = [&](double t) {
    trace.times.push_back(t);
    trace.states.insert(trace.states.end(), x.begin(), x.end());
    if (recorder.fill) {
      recorder.fill(t, x, row);
      trace.derived.values.insert(trace.derived.values.end(), row.begin(), row.end());
    }
  };

  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (config.method == Method::Euler) {
      rhs(t, x, k1);
      for (std::size_t i = 0; i < dim; ++i) x[i] += dt * k1[i];
    } else {
      const double half = 0.5 * dt;
      rhs(t, x, k1);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + half * k1[i];
      rhs(t + half, tmp, k2);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + half * k2[i];
      rhs(t + half, tmp, k3);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + dt * k3[i];
      rhs(t + dt, tmp, k4);
      for (std::size_t i = 0; i < dim; ++i)
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(x, k + 1);
    if ((k + 1) % config.record_stride == 0) record(static_cast<double>(k + 1) * dt);
  }
  return trace;
}

}  // namespace mastrack
