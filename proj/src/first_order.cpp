#include "mastrack/first_order.hpp"

#include <cmath>
#include <sstream>

namespace mastrack {

void validate(const Gains& gains, std::size_t n) {
  if (!(gains.k > 0.0)) throw ValidationError("gains.k must be positive");
  if (!(gains.l > 0.0)) throw ValidationError("gains.l must be positive");
  if (gains.tau.size() != n) {
    std::ostringstream msg;
    msg << "gains.tau has " << gains.tau.size() << " entries, expected " << n;
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!(gains.tau[i] > 0.0))
      throw ValidationError("gains.tau[" + std::to_string(i) + "] must be positive");
}

double LeaderAccess::read_position(std::size_t i) const {
  if (audit_) {
    ++audit_->position_reads[i];
    if (!(graph_->b(i) > 0.0)) ++audit_->violations;
  }
  return position_;
}

double LeaderAccess::read_input(std::size_t i) const {
  if (audit_) {
    ++audit_->input_reads[i];
    if (!(graph_->b(i) > 0.0)) ++audit_->violations;
  }
  return input_;
}

double LeaderAccess::weighted_position(std::size_t i) const {
  const double b = graph_->b(i);
  return b > 0.0 ? b * read_position(i) : 0.0;
}

double LeaderAccess::weighted2_position(std::size_t i) const {
  const double b = graph_->b(i);
  return b > 0.0 ? b * b * read_position(i) : 0.0;
}

double LeaderAccess::weighted_input_residual(std::size_t i, double value) const {
  const double b = graph_->b(i);
  return b > 0.0 ? b * (value - read_input(i)) : 0.0;
}

double LeaderAccess::weighted_input(std::size_t i) const {
  const double b = graph_->b(i);
  return b > 0.0 ? b * read_input(i) : 0.0;
}

namespace {

// sum_j a_ij (v_i - v_j)
double neighbor_disagreement(std::span<const double> v, const GraphMatrices& g, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j : g.neighbors(i)) acc += g.a(i, j) * (v[i] - v[j]);
  return acc;
}

}  // namespace

Vector consensus_residual(std::span<const double> u_hat0, const GraphMatrices& graph,
                          const LeaderAccess& leader) {
  const std::size_t n = graph.size();
  Vector s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = neighbor_disagreement(u_hat0, graph, i) + leader.weighted_input_residual(i, u_hat0[i]);
  return s;
}

InputObserverRates input_observer_rhs(std::span<const double> u_hat0, std::span<const double> d,
                                      const GraphMatrices& graph, const LeaderAccess& leader,
                                      std::span<const double> tau, Signum sgn) {
  const Vector s = consensus_residual(u_hat0, graph, leader);
  const std::size_t n = s.size();
  InputObserverRates r{Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    r.du_hat0[i] = -s[i] - d[i] * sgn(s[i]);
    r.dd[i] = tau[i] * std::abs(s[i]);
  }
  return r;
}

namespace first_order {

State State::view(std::span<const double> flat, std::size_t n) {
  const Layout lay{n};
  if (flat.size() != lay.dim()) throw std::invalid_argument("first_order::State: wrong state dimension");
  State s;
  s.x0 = flat[lay.x0()];
  s.x = flat.subspan(lay.x(), n);
  s.u_hat0 = flat.subspan(lay.u_hat0(), n);
  s.d = flat.subspan(lay.d(), n);
  s.z_f0 = flat.subspan(lay.z_f0(), n);
  s.z_f = flat.subspan(lay.z_f(), n);
  return s;
}

namespace {

Vector leader_disturbance_estimate(const State& s, const LeaderAccess& leader) {
  Vector f_hat0(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) f_hat0[i] = s.z_f0[i] + leader.weighted_position(i);
  return f_hat0;
}

}  // namespace

Estimates estimates(const State& s, const Gains& gains, const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Estimates est{leader_disturbance_estimate(s, leader), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) est.f_hat[i] = s.z_f[i] + gains.l * s.x[i];
  return est;
}

namespace {

Vector controller_from(const State& s, const Estimates& est, const Gains& gains,
                       const GraphMatrices& graph, const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Vector u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = graph.b(i);
    const double leader_term = b > 0.0 ? b * s.x[i] - leader.weighted_position(i) : 0.0;
    const double coupling = neighbor_disagreement(s.x, graph, i) + leader_term;
    u[i] = -gains.k * coupling + s.u_hat0[i] + est.f_hat0[i] - est.f_hat[i];
  }
  return u;
}

Vector leader_dist_from(const State& s, std::span<const double> f_hat0, const GraphMatrices& graph,
                        const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) {
    dz[i] = -graph.b(i) * s.z_f0[i] - leader.weighted2_position(i) -
            neighbor_disagreement(f_hat0, graph, i) - leader.weighted_input(i);
  }
  return dz;
}

}  // namespace

Vector controller(const State& s, const Gains& gains, const GraphMatrices& graph,
                  const LeaderAccess& leader) {
  return controller_from(s, estimates(s, gains, leader), gains, graph, leader);
}

Vector leader_dist_observer_rhs(const State& s, const GraphMatrices& graph, const LeaderAccess& leader) {
  return leader_dist_from(s, leader_disturbance_estimate(s, leader), graph, leader);
}

Vector local_dist_observer_rhs(const State& s, const Gains& gains, std::span<const double> u) {
  const std::size_t n = s.size();
  Vector dz(n);
  const double l = gains.l;
  for (std::size_t i = 0; i < n; ++i) dz[i] = -l * s.z_f[i] - l * l * s.x[i] - l * u[i];
  return dz;
}

void closed_loop_rhs(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                     const ScenarioSignals& signals, double t, std::span<double> dxdt, Signum sgn,
                     LeaderAudit* audit) {
  const std::size_t n = graph.size();
  const Layout lay{n};
  const State s = State::view(flat, n);
  const double u0 = signals.u0.value(t);
  const LeaderAccess leader(graph, s.x0, u0, audit);

  // algebraic estimates -> controller -> observer derivatives
  const Estimates est = estimates(s, gains, leader);
  const Vector u = controller_from(s, est, gains, graph, leader);
  const InputObserverRates in = input_observer_rhs(s.u_hat0, s.d, graph, leader, gains.tau, sgn);
  const Vector dz_f0 = leader_dist_from(s, est.f_hat0, graph, leader);
  const Vector dz_f = local_dist_observer_rhs(s, gains, u);

  dxdt[lay.x0()] = u0 + signals.f0.value(t);
  for (std::size_t i = 0; i < n; ++i) {
    dxdt[lay.x() + i] = u[i] + signals.f[i].value(t);
    dxdt[lay.u_hat0() + i] = in.du_hat0[i];
    dxdt[lay.d() + i] = in.dd[i];
    dxdt[lay.z_f0() + i] = dz_f0[i];
    dxdt[lay.z_f() + i] = dz_f[i];
  }
}

Errors extract_errors(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                      const ScenarioSignals& signals, double t) {
  const std::size_t n = graph.size();
  const State s = State::view(flat, n);
  const LeaderAccess leader(graph, s.x0, signals.u0.value(t));
  const Estimates est = estimates(s, gains, leader);
  const double u0 = signals.u0.value(t);
  const double f0 = signals.f0.value(t);
  Errors err{Vector(n), Vector(n), Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    err.e_u[i] = s.u_hat0[i] - u0;
    err.e_0f[i] = est.f_hat0[i] - f0;
    err.e_f[i] = est.f_hat[i] - signals.f[i].value(t);
    err.e[i] = s.x[i] - s.x0;
  }
  return err;
}

ErrorRates error_oracle_rhs(const Errors& err, std::span<const double> d, const GraphMatrices& graph,
                            const Gains& gains, double du0, double df0, std::span<const double> df,
                            Signum sgn) {
  const auto& h = graph.h;
  const std::size_t n = h.rows();
  const Vector he_u = h * err.e_u;
  const Vector he_0f = h * err.e_0f;
  const Vector he = h * err.e;
  ErrorRates r{Vector(n), Vector(n), Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    r.de_u[i] = -he_u[i] - d[i] * sgn(he_u[i]) - du0;
    r.de_0f[i] = -he_0f[i] - df0;
    r.de_f[i] = -gains.l * err.e_f[i] - df[i];
    r.de[i] = -gains.k * he[i] + err.e_0f[i] + err.e_u[i] - err.e_f[i];
  }
  return r;
}

}  // namespace first_order
}  // namespace mastrack
