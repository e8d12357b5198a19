#include "mastrack/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mastrack {

namespace {

void require_reachable(const GraphMatrices& graph) {
  if (!(graph.lambda_min_h > kReachabilityTolerance)) throw CertificationError("leader not globally reachable");
}

struct LyapunovConstants {
  double ratio_sqrt;  // sqrt(lambda_max / lambda_min)
  double gain;        // lambda_max ||P|| / lambda_min
};

LyapunovConstants lyapunov_constants(linalg::BlockKind kind, const GraphMatrices& graph,
                                     const Gains& gains, BoundCertificate& cert) {
  const linalg::Matrix q = linalg::assemble_q(kind, graph.h, gains.l, gains.k);
  linalg::LyapunovSolution sol;
  try {
    sol = linalg::solve_lyapunov(q);
  } catch (const linalg::LyapunovError& e) {
    throw CertificationError(std::string(linalg::to_string(kind)) + ": " + e.what());
  }
  const std::string name = "P" + std::string(linalg::to_string(kind)).substr(1);
  cert.sub_bounds[name + "_lambda_min"] = sol.lambda_min_p;
  cert.sub_bounds[name + "_lambda_max"] = sol.lambda_max_p;
  cert.sub_bounds[name + "_norm"] = sol.spectral_norm_p;
  cert.sub_bounds[name + "_residual"] = sol.residual;
  return {std::sqrt(sol.lambda_max_p / sol.lambda_min_p),
          sol.lambda_max_p * sol.spectral_norm_p / sol.lambda_min_p};
}

}  // namespace

BoundCertificate certify_first_order(const GraphMatrices& graph, const Gains& gains,
                                     const RateBounds& rates, const ErrorNorms& initial) {
  require_reachable(graph);
  validate(gains, graph.size());
  BoundCertificate c;
  c.order = Order::First;
  c.lambda_min_h = graph.lambda_min_h;
  c.rates = rates;
  c.k = gains.k;
  c.l = gains.l;
  c.initial = initial;

  const double lam = graph.lambda_min_h;
  const double q0_term = rates.q0 / lam;
  const double q1_term = rates.q1 / gains.l;
  c.sub_bounds["leader_dist_transient"] = initial.e_0f + q0_term;
  c.sub_bounds["leader_dist_asymptotic"] = q0_term;
  c.sub_bounds["local_dist_transient"] = initial.e_f + q1_term;
  c.sub_bounds["local_dist_asymptotic"] = q1_term;
  c.transient_bound =
      initial.e + (initial.e_0f + initial.e_u + initial.e_f + q0_term + q1_term) / (gains.k * lam);
  c.asymptotic_bound = (q0_term + q1_term) / (gains.k * lam);
  return c;
}

BoundCertificate certify_second_order(const GraphMatrices& graph, const Gains& gains,
                                      const RateBounds& rates, const ErrorNorms& initial) {
  require_reachable(graph);
  validate(gains, graph.size());
  BoundCertificate c;
  c.order = Order::Second;
  c.lambda_min_h = graph.lambda_min_h;
  c.rates = rates;
  c.k = gains.k;
  c.l = gains.l;
  c.initial = initial;

  using linalg::BlockKind;
  const auto p1 = lyapunov_constants(BlockKind::Q1, graph, gains, c);
  const auto p2 = lyapunov_constants(BlockKind::Q2, graph, gains, c);
  const auto p3 = lyapunov_constants(BlockKind::Q3, graph, gains, c);

  const double sqrt2 = std::sqrt(2.0);
  const double eu_q0 = std::sqrt(2.0 * (initial.e_u * initial.e_u + rates.q0 * rates.q0));

  c.sub_bounds["leader_observers_transient"] = p1.ratio_sqrt * initial.e_0vf + p1.gain * eu_q0;
  c.sub_bounds["leader_observers_asymptotic"] = sqrt2 * p1.gain * rates.q0;
  c.sub_bounds["own_observers_transient"] = p2.ratio_sqrt * initial.e_vf + sqrt2 * p2.gain * rates.q1;
  c.sub_bounds["own_observers_asymptotic"] = sqrt2 * p2.gain * rates.q1;

  c.transient_bound =
      p3.ratio_sqrt * initial.e +
      p3.gain * (2.0 * p2.ratio_sqrt * initial.e_vf + 2.0 * sqrt2 * p2.gain * rates.q1 +
                 2.0 * p1.ratio_sqrt * initial.e_0vf + 2.0 * p1.gain * eu_q0 + sqrt2 * initial.e_u);
  c.asymptotic_bound =
      p3.gain * (2.0 * sqrt2 * p2.gain * rates.q1 + 2.0 * sqrt2 * p1.gain * rates.q0);
  return c;
}

RateBounds scenario_rate_bounds(const Scenario& s) {
  return rate_bounds(s.signals.u0, s.signals.f0, s.signals.f, Horizon{0.0, s.integration.t_end},
                     s.integration.dt / 10.0);
}

BoundCertificate certify(const Scenario& s) {
  validate(s);
  const GraphMatrices graph = build_matrices(s.topology);
  const RateBounds rates = scenario_rate_bounds(s);
  const ErrorNorms initial = initial_error_norms(s);
  return s.order == Order::First ? certify_first_order(graph, s.gains, rates, initial)
                                 : certify_second_order(graph, s.gains, rates, initial);
}

// ---------------------------------------------------------------------------

bool VerificationReport::all_pass() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimVerdict& c) { return c.pass; });
}

const ClaimVerdict& VerificationReport::claim(const std::string& name) const {
  for (const auto& c : claims)
    if (c.name == name) return c;
  throw std::out_of_range("no claim named '" + name + "'");
}

namespace {

// Per-row norm of a vector assembled from trace columns.
std::vector<double> row_norms(const Table& table, const std::vector<std::size_t>& cols,
                              const std::vector<std::size_t>& minus = {}) {
  std::vector<double> out(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double v = table.at(r, cols[k]) - (minus.empty() ? 0.0 : table.at(r, minus[k]));
      acc += v * v;
    }
    out[r] = std::sqrt(acc);
  }
  return out;
}

std::vector<std::size_t> block_cols(const Table& table, const std::string& stem, std::size_t n) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 1; i <= n; ++i) cols.push_back(table.column(stem + "_" + std::to_string(i)));
  return cols;
}

std::vector<double> hypot_rows(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) out[r] = std::hypot(a[r], b[r]);
  return out;
}

ClaimVerdict check(const std::string& name, const std::vector<double>& series,
                   const std::vector<double>& times, double from, double bound) {
  ClaimVerdict v;
  v.name = name;
  v.bound = bound;
  for (std::size_t r = 0; r < series.size(); ++r)
    if (times[r] >= from) v.observed = std::max(v.observed, series[r]);
  v.pass = v.observed <= v.bound;
  return v;
}

}  // namespace

VerificationReport verify_bounds(const SimTrace& trace, const BoundCertificate& cert,
                                 double settle_time) {
  if (trace.metadata.order != to_string(cert.order))
    throw std::invalid_argument("certificate order '" + std::string(to_string(cert.order)) +
                                "' does not match trace order '" + trace.metadata.order + "'");
  if (trace.times.empty() || trace.times.back() < settle_time)
    throw std::invalid_argument("trace ends before the settle time");

  const Table& tab = trace.derived;
  const auto& t = trace.times;
  const double t0 = -1.0;
  VerificationReport rep;
  const auto& sb = cert.sub_bounds;

  if (cert.order == Order::First) {
    const auto e = tab.column_values("err_pos_norm");
    const auto e_0f = tab.column_values("err_f0_norm");
    const auto e_f = tab.column_values("err_f_norm");
    rep.claims.push_back(check("tracking_transient", e, t, t0, cert.transient_bound));
    rep.claims.push_back(check("tracking_asymptotic", e, t, settle_time, cert.asymptotic_bound));
    rep.claims.push_back(
        check("leader_dist_transient", e_0f, t, t0, sb.at("leader_dist_transient") + kLeaderDistSlack));
    rep.claims.push_back(
        check("leader_dist_asymptotic", e_0f, t, settle_time, sb.at("leader_dist_asymptotic") + kLeaderDistSlack));
    rep.claims.push_back(
        check("local_dist_transient", e_f, t, t0, sb.at("local_dist_transient") + kLocalDistSlack));
    rep.claims.push_back(
        check("local_dist_asymptotic", e_f, t, settle_time, sb.at("local_dist_asymptotic") + kLocalDistSlack));
    return rep;
  }

  std::size_t n = 0;
  while (tab.has_column("x_" + std::to_string(n + 1))) ++n;
  const auto e = hypot_rows(tab.column_values("err_pos_norm"), tab.column_values("err_vel_norm"));

  std::vector<std::size_t> v0_cols(n, tab.column("v0"));
  const auto e_0v = row_norms(tab, block_cols(tab, "vhat0", n), v0_cols);
  const auto e_0vf = hypot_rows(e_0v, tab.column_values("err_f0_norm"));
  const auto e_v = row_norms(tab, block_cols(tab, "vhat", n), block_cols(tab, "v", n));
  const auto e_vf = hypot_rows(e_v, tab.column_values("err_f_norm"));

  rep.claims.push_back(check("tracking_transient", e, t, t0, cert.transient_bound));
  rep.claims.push_back(check("tracking_asymptotic", e, t, settle_time, cert.asymptotic_bound));
  rep.claims.push_back(check("leader_observers_transient", e_0vf, t, t0, sb.at("leader_observers_transient")));
  rep.claims.push_back(check("leader_observers_asymptotic", e_0vf, t, settle_time, sb.at("leader_observers_asymptotic")));
  rep.claims.push_back(check("own_observers_transient", e_vf, t, t0, sb.at("own_observers_transient")));
  rep.claims.push_back(check("own_observers_asymptotic", e_vf, t, settle_time, sb.at("own_observers_asymptotic")));
  return rep;
}

}  // namespace mastrack
