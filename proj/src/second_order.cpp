#include "mastrack/second_order.hpp"

#include <stdexcept>

namespace mastrack::second_order {

namespace {

double neighbor_disagreement(std::span<const double> v, const GraphMatrices& g, std::size_t i) {
  double acc = 0.0;
  for (std::size_t j : g.neighbors(i)) acc += g.a(i, j) * (v[i] - v[j]);
  return acc;
}

}  // namespace

State State::view(std::span<const double> flat, std::size_t n) {
  const Layout lay{n};
  if (flat.size() != lay.dim()) throw std::invalid_argument("second_order::State: wrong state dimension");
  State s;
  s.x0 = flat[lay.x0()];
  s.x = flat.subspan(lay.x(), n);
  s.u_hat0 = flat.subspan(lay.u_hat0(), n);
  s.d = flat.subspan(lay.d(), n);
  s.z_v0 = flat.subspan(lay.z_v0(), n);
  s.z_f0 = flat.subspan(lay.z_f0(), n);
  s.z_v = flat.subspan(lay.z_v(), n);
  s.z_f = flat.subspan(lay.z_f(), n);
  return s;
}

Estimates estimates(const State& s, const Gains& gains, const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Estimates est{Vector(n), Vector(n), Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    est.v_hat0[i] = s.z_v0[i] + leader.weighted_position(i);
    est.f_hat0[i] = s.z_f0[i] + est.v_hat0[i];
    est.v_hat[i] = s.z_v[i] + gains.l * s.x[i];
    est.f_hat[i] = s.z_f[i] + est.v_hat[i];
  }
  return est;
}

Vector controller(const State& s, const Estimates& est, const Gains& gains, const GraphMatrices& graph,
                  const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Vector u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = graph.b(i);
    const double leader_term = b > 0.0 ? b * s.x[i] - leader.weighted_position(i) : 0.0;
    const double coupling = neighbor_disagreement(s.x, graph, i) + leader_term;
    u[i] = -gains.k * coupling - (est.v_hat[i] - est.v_hat0[i]) + s.u_hat0[i] + est.f_hat0[i] -
           est.f_hat[i];
  }
  return u;
}

Vector leader_velocity_observer_rhs(const State& s, const Estimates& est, const GraphMatrices& graph,
                                    const LeaderAccess& leader) {
  const std::size_t n = s.size();
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) {
    dz[i] = -graph.b(i) * s.z_v0[i] - leader.weighted2_position(i) -
            neighbor_disagreement(est.v_hat0, graph, i) + est.f_hat0[i] + s.u_hat0[i];
  }
  return dz;
}

Vector leader_dist_observer_rhs(const State& s, const Estimates& est) {
  const std::size_t n = s.size();
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) dz[i] = -s.z_f0[i] - est.v_hat0[i] - s.u_hat0[i];
  return dz;
}

Vector own_velocity_observer_rhs(const State& s, const Estimates& est, const Gains& gains,
                                 std::span<const double> u) {
  const std::size_t n = s.size();
  const double l = gains.l;
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) dz[i] = -l * s.z_v[i] - l * l * s.x[i] + est.f_hat[i] + u[i];
  return dz;
}

Vector own_dist_observer_rhs(const State& s, const Estimates& est, std::span<const double> u) {
  const std::size_t n = s.size();
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) dz[i] = -s.z_f[i] - est.v_hat[i] - u[i];
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

  const Estimates est = estimates(s, gains, leader);
  const Vector u = controller(s, est, gains, graph, leader);
  const InputObserverRates in = input_observer_rhs(s.u_hat0, s.d, graph, leader, gains.tau, sgn);
  const Vector dz_v0 = leader_velocity_observer_rhs(s, est, graph, leader);
  const Vector dz_f0 = leader_dist_observer_rhs(s, est);
  const Vector dz_v = own_velocity_observer_rhs(s, est, gains, u);
  const Vector dz_f = own_dist_observer_rhs(s, est, u);

  // Physical kinematics: the only place velocities are read.
  dxdt[lay.x0()] = flat[lay.v0()];
  dxdt[lay.v0()] = u0 + signals.f0.value(t);
  for (std::size_t i = 0; i < n; ++i) {
    dxdt[lay.x() + i] = flat[lay.v() + i];
    dxdt[lay.v() + i] = u[i] + signals.f[i].value(t);
    dxdt[lay.u_hat0() + i] = in.du_hat0[i];
    dxdt[lay.d() + i] = in.dd[i];
    dxdt[lay.z_v0() + i] = dz_v0[i];
    dxdt[lay.z_f0() + i] = dz_f0[i];
    dxdt[lay.z_v() + i] = dz_v[i];
    dxdt[lay.z_f() + i] = dz_f[i];
  }
}

Errors extract_errors(std::span<const double> flat, const Gains& gains, const GraphMatrices& graph,
                      const ScenarioSignals& signals, double t) {
  const std::size_t n = graph.size();
  const Layout lay{n};
  const State s = State::view(flat, n);
  const double u0 = signals.u0.value(t);
  const double f0 = signals.f0.value(t);
  const LeaderAccess leader(graph, s.x0, u0);
  const Estimates est = estimates(s, gains, leader);
  const double v0 = flat[lay.v0()];

  Errors err{Vector(n), Vector(2 * n), Vector(2 * n), Vector(2 * n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = flat[lay.v() + i];
    err.e_u[i] = s.u_hat0[i] - u0;
    err.e_0vf[i] = est.v_hat0[i] - v0;
    err.e_0vf[n + i] = est.f_hat0[i] - f0;
    err.e_vf[i] = est.v_hat[i] - vi;
    err.e_vf[n + i] = est.f_hat[i] - signals.f[i].value(t);
    err.e[i] = s.x[i] - s.x0;
    err.e[n + i] = vi - v0;
  }
  return err;
}

ErrorBlocks ErrorBlocks::build(const GraphMatrices& graph, const Gains& gains) {
  using linalg::BlockKind;
  return ErrorBlocks{graph.h, linalg::assemble_q(BlockKind::Q1, graph.h, gains.l, gains.k),
                     linalg::assemble_q(BlockKind::Q2, graph.h, gains.l, gains.k),
                     linalg::assemble_q(BlockKind::Q3, graph.h, gains.l, gains.k)};
}

ErrorRates error_oracle_rhs(const Errors& err, std::span<const double> e_u_feed,
                            std::span<const double> d, const ErrorBlocks& blocks, double du0,
                            double df0, std::span<const double> df, Signum sgn) {
  const std::size_t n = blocks.h.rows();
  ErrorRates r;

  const Vector he_u = blocks.h * err.e_u;
  r.de_u.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.de_u[i] = -he_u[i] - d[i] * sgn(he_u[i]) - du0;

  r.de_0vf = blocks.q1 * err.e_0vf;
  for (std::size_t i = 0; i < n; ++i) {
    r.de_0vf[i] += e_u_feed[i];
    r.de_0vf[n + i] -= df0;
  }

  r.de_vf = blocks.q2 * err.e_vf;
  for (std::size_t i = 0; i < n; ++i) r.de_vf[n + i] -= df[i];

  r.de = blocks.q3 * err.e;
  for (std::size_t i = 0; i < n; ++i) {
    const double e_v = err.e_vf[i];
    const double e_f = err.e_vf[n + i];
    const double e_0v = err.e_0vf[i];
    const double e_0f = err.e_0vf[n + i];
    r.de[n + i] += -e_v + e_0v + e_0f - e_f + e_u_feed[i];
  }
  return r;
}

}  // namespace mastrack::second_order
