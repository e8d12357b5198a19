#pragma once

// A complete simulation case: topology, gains, signals, initial conditions
// and integration settings.

#include <string>
#include <vector>

#include "mastrack/first_order.hpp"
#include "mastrack/graph.hpp"
#include "mastrack/integrator.hpp"
#include "mastrack/signals.hpp"

namespace mastrack {

enum class Order { First, Second };

const char* to_string(Order order);
Order order_from_string(const std::string& name);

/// Empty observer vectors mean "start at zero".
struct InitialState {
  double x0 = 0.0;
  double v0 = 0.0;              // second order only
  std::vector<double> x;
  std::vector<double> v;        // second order only
  std::vector<double> u_hat0;
  std::vector<double> d;
  std::vector<double> z_f0;
  std::vector<double> z_f;
  std::vector<double> z_v0;     // second order only
  std::vector<double> z_v;      // second order only

  friend bool operator==(const InitialState&, const InitialState&) = default;
};

struct Scenario {
  std::string name;
  std::string description;
  Order order = Order::First;
  Topology topology;
  Gains gains;
  ScenarioSignals signals;
  InitialState init;
  IntegrationConfig integration;

  [[nodiscard]] std::size_t n() const noexcept { return topology.n_followers; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ValidationError whose message starts with the JSON path of the
/// offending field, e.g. "signals.f: expected 5 entries, got 4".
void validate(const Scenario& s);

/// Flat initial state in the layout of the scenario's order.
std::vector<double> initial_state(const Scenario& s);

}  // namespace mastrack
