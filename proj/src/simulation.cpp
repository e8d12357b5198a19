#include "mastrack/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "mastrack/scenario_io.hpp"
#include "mastrack/second_order.hpp"

namespace mastrack {

namespace {

void add_block(std::vector<std::string>& cols, const std::string& stem, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) cols.push_back(stem + "_" + std::to_string(i));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Vector signal_derivatives(const std::vector<SignalSpec>& f, double t) {
  Vector df(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) df[i] = f[i].derivative(t);
  return df;
}

Signum signum_for(const Scenario& s) { return Signum{s.integration.sgn_smoothing_epsilon}; }

}  // namespace

std::vector<std::string> trace_columns(Order order, std::size_t n) {
  std::vector<std::string> cols{"t", "x0"};
  if (order == Order::Second) cols.push_back("v0");
  add_block(cols, "x", n);
  if (order == Order::Second) add_block(cols, "v", n);
  add_block(cols, "uhat0", n);
  add_block(cols, "d", n);
  add_block(cols, "fhat0", n);
  add_block(cols, "fhat", n);
  if (order == Order::Second) {
    add_block(cols, "vhat0", n);
    add_block(cols, "vhat", n);
  }
  add_block(cols, "u", n);
  cols.push_back("err_pos_norm");
  if (order == Order::Second) cols.push_back("err_vel_norm");
  for (const char* c : {"err_u_norm", "err_f0_norm", "err_f_norm"}) cols.push_back(c);
  return cols;
}

ErrorNorms initial_error_norms(const Scenario& s) {
  const GraphMatrices graph = build_matrices(s.topology);
  const std::vector<double> x = initial_state(s);
  ErrorNorms out;
  if (s.order == Order::First) {
    const auto err = first_order::extract_errors(x, s.gains, graph, s.signals, 0.0);
    out.e = linalg::norm2(err.e);
    out.e_u = linalg::norm2(err.e_u);
    out.e_0f = linalg::norm2(err.e_0f);
    out.e_f = linalg::norm2(err.e_f);
    return out;
  }
  const std::size_t n = s.n();
  const auto err = second_order::extract_errors(x, s.gains, graph, s.signals, 0.0);
  out.e = linalg::norm2(err.e);
  out.e_u = linalg::norm2(err.e_u);
  out.e_0vf = linalg::norm2(err.e_0vf);
  out.e_vf = linalg::norm2(err.e_vf);
  out.e_0f = linalg::norm2(std::span<const double>(err.e_0vf).subspan(n));
  out.e_f = linalg::norm2(std::span<const double>(err.e_vf).subspan(n));
  return out;
}

namespace {

Recorder first_order_recorder(const Scenario& s, const GraphMatrices& graph) {
  const std::size_t n = s.n();
  Recorder rec;
  rec.columns = trace_columns(Order::First, n);
  rec.fill = [&s, &graph, n](double t, std::span<const double> flat, std::span<double> row) {
    using namespace first_order;
    const Layout lay{n};
    const State st = State::view(flat, n);
    const LeaderAccess leader(graph, st.x0, s.signals.u0.value(t));
    const Estimates est = estimates(st, s.gains, leader);
    const Vector u = controller(st, s.gains, graph, leader);
    const Errors err = extract_errors(flat, s.gains, graph, s.signals, t);
    std::size_t c = 0;
    row[c++] = t;
    row[c++] = flat[lay.x0()];
    for (auto block : {st.x, st.u_hat0, st.d, std::span<const double>(est.f_hat0),
                       std::span<const double>(est.f_hat), std::span<const double>(u)})
      for (double v : block) row[c++] = v;
    row[c++] = linalg::norm2(err.e);
    row[c++] = linalg::norm2(err.e_u);
    row[c++] = linalg::norm2(err.e_0f);
    row[c++] = linalg::norm2(err.e_f);
  };
  return rec;
}

Recorder second_order_recorder(const Scenario& s, const GraphMatrices& graph) {
  const std::size_t n = s.n();
  Recorder rec;
  rec.columns = trace_columns(Order::Second, n);
  rec.fill = [&s, &graph, n](double t, std::span<const double> flat, std::span<double> row) {
    using namespace second_order;
    const Layout lay{n};
    const State st = State::view(flat, n);
    const LeaderAccess leader(graph, st.x0, s.signals.u0.value(t));
    const Estimates est = estimates(st, s.gains, leader);
    const Vector u = controller(st, est, s.gains, graph, leader);
    const Errors err = extract_errors(flat, s.gains, graph, s.signals, t);
    const std::span<const double> e(err.e), e_0vf(err.e_0vf), e_vf(err.e_vf);
    std::size_t c = 0;
    row[c++] = t;
    row[c++] = flat[lay.x0()];
    row[c++] = flat[lay.v0()];
    for (auto block : {st.x, flat.subspan(lay.v(), n), st.u_hat0, st.d,
                       std::span<const double>(est.f_hat0), std::span<const double>(est.f_hat),
                       std::span<const double>(est.v_hat0), std::span<const double>(est.v_hat),
                       std::span<const double>(u)})
      for (double v : block) row[c++] = v;
    row[c++] = linalg::norm2(e.first(n));
    row[c++] = linalg::norm2(e.subspan(n));
    row[c++] = linalg::norm2(err.e_u);
    row[c++] = linalg::norm2(e_0vf.subspan(n));
    row[c++] = linalg::norm2(e_vf.subspan(n));
  };
  return rec;
}

}  // namespace

SimTrace run_scenario(const Scenario& s, LeaderAudit* audit) {
  const std::vector<double> x_init = initial_state(s);
  const GraphMatrices graph = build_matrices(s.topology);
  const Signum sgn = signum_for(s);

  RhsFn rhs;
  Recorder rec;
  if (s.order == Order::First) {
    rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
      first_order::closed_loop_rhs(x, s.gains, graph, s.signals, t, dx, sgn, audit);
    };
    rec = first_order_recorder(s, graph);
  } else {
    rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
      second_order::closed_loop_rhs(x, s.gains, graph, s.signals, t, dx, sgn, audit);
    };
    rec = second_order_recorder(s, graph);
  }
  SimTrace trace = integrate(rhs, x_init, s.integration, rec);
  trace.metadata.order = to_string(s.order);
  trace.metadata.scenario_digest = scenario_digest(s);
  return trace;
}

// ---------------------------------------------------------------------------
// Twin integration

namespace {

struct Twin {
  std::vector<std::string> blocks;
  std::vector<std::size_t> widths;
  std::size_t cl_dim = 0;
  std::function<std::vector<double>(double, std::span<const double>)> errors;  // closed loop -> stacked
  RhsFn rhs;
};

std::vector<double> stack(std::initializer_list<std::span<const double>> parts) {
  std::vector<double> out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Twin first_order_twin(const Scenario& s, const GraphMatrices& graph, OracleFeed feed) {
  using namespace first_order;
  const std::size_t n = s.n();
  Twin tw;
  tw.blocks = {"e_u", "e_0f", "e_f", "e"};
  tw.widths = {n, n, n, n};
  tw.cl_dim = Layout{n}.dim();
  tw.errors = [&s, &graph](double t, std::span<const double> flat) {
    const Errors e = extract_errors(flat, s.gains, graph, s.signals, t);
    return stack({e.e_u, e.e_0f, e.e_f, e.e});
  };
  const std::size_t cl = tw.cl_dim;
  const Signum sgn = signum_for(s);
  tw.rhs = [&s, &graph, n, cl, sgn, feed](double t, std::span<const double> x, std::span<double> dx) {
    const auto flat = x.first(cl);
    closed_loop_rhs(flat, s.gains, graph, s.signals, t, dx.first(cl), sgn);
    const auto o = x.subspan(cl);
    Errors own{Vector(o.begin(), o.begin() + n), Vector(o.begin() + n, o.begin() + 2 * n),
               Vector(o.begin() + 2 * n, o.begin() + 3 * n), Vector(o.begin() + 3 * n, o.end())};
    const auto d = flat.subspan(Layout{n}.d(), n);
    const double du0 = s.signals.u0.derivative(t);
    const double df0 = s.signals.f0.derivative(t);
    const Vector df = signal_derivatives(s.signals.f, t);
    const ErrorRates r = error_oracle_rhs(own, d, graph, s.gains, du0, df0, df, sgn);
    Vector de = r.de;
    if (feed == OracleFeed::ClosedLoop) {
      Errors mixed = own;
      mixed.e_u = extract_errors(flat, s.gains, graph, s.signals, t).e_u;
      de = error_oracle_rhs(mixed, d, graph, s.gains, du0, df0, df, sgn).de;
    }
    auto out = dx.subspan(cl);
    std::copy(r.de_u.begin(), r.de_u.end(), out.begin());
    std::copy(r.de_0f.begin(), r.de_0f.end(), out.begin() + n);
    std::copy(r.de_f.begin(), r.de_f.end(), out.begin() + 2 * n);
    std::copy(de.begin(), de.end(), out.begin() + 3 * n);
  };
  return tw;
}

Twin second_order_twin(const Scenario& s, const GraphMatrices& graph, OracleFeed feed) {
  using namespace second_order;
  const std::size_t n = s.n();
  Twin tw;
  tw.blocks = {"e_u", "e_0vf", "e_vf", "e"};
  tw.widths = {n, 2 * n, 2 * n, 2 * n};
  tw.cl_dim = Layout{n}.dim();
  tw.errors = [&s, &graph](double t, std::span<const double> flat) {
    const Errors e = extract_errors(flat, s.gains, graph, s.signals, t);
    return stack({e.e_u, e.e_0vf, e.e_vf, e.e});
  };
  const std::size_t cl = tw.cl_dim;
  const Signum sgn = signum_for(s);
  const ErrorBlocks blocks = ErrorBlocks::build(graph, s.gains);
  tw.rhs = [&s, &graph, n, cl, sgn, feed, blocks](double t, std::span<const double> x,
                                                  std::span<double> dx) {
    const auto flat = x.first(cl);
    closed_loop_rhs(flat, s.gains, graph, s.signals, t, dx.first(cl), sgn);
    const auto o = x.subspan(cl);
    Errors own{Vector(o.begin(), o.begin() + n), Vector(o.begin() + n, o.begin() + 3 * n),
               Vector(o.begin() + 3 * n, o.begin() + 5 * n), Vector(o.begin() + 5 * n, o.end())};
    const auto d = flat.subspan(Layout{n}.d(), n);
    const Vector feed_e_u =
        feed == OracleFeed::ClosedLoop ? extract_errors(flat, s.gains, graph, s.signals, t).e_u : own.e_u;
    const ErrorRates r =
        error_oracle_rhs(own, feed_e_u, d, blocks, s.signals.u0.derivative(t),
                         s.signals.f0.derivative(t), signal_derivatives(s.signals.f, t), sgn);
    auto out = dx.subspan(cl);
    auto it = std::copy(r.de_u.begin(), r.de_u.end(), out.begin());
    it = std::copy(r.de_0vf.begin(), r.de_0vf.end(), it);
    it = std::copy(r.de_vf.begin(), r.de_vf.end(), it);
    std::copy(r.de.begin(), r.de.end(), it);
  };
  return tw;
}

}  // namespace

OracleReport compare_with_oracle(const Scenario& s, OracleFeed feed) {
  const GraphMatrices graph = build_matrices(s.topology);
  const Twin tw = s.order == Order::First ? first_order_twin(s, graph, feed)
                                          : second_order_twin(s, graph, feed);

  std::vector<double> x_init = initial_state(s);
  const std::vector<double> e0 = tw.errors(0.0, x_init);
  x_init.insert(x_init.end(), e0.begin(), e0.end());

  OracleReport report;
  report.blocks = tw.blocks;
  report.max_diff.assign(tw.blocks.size(), 0.0);

  Recorder rec;
  rec.columns = {"t"};
  for (const auto& b : tw.blocks) rec.columns.push_back("diff_" + b);
  rec.fill = [&](double t, std::span<const double> x, std::span<double> row) {
    const std::vector<double> cl = tw.errors(t, x.first(tw.cl_dim));
    const auto oracle = x.subspan(tw.cl_dim);
    row[0] = t;
    std::size_t off = 0;
    for (std::size_t b = 0; b < tw.blocks.size(); ++b) {
      const std::size_t w = tw.widths[b];
      const double m = max_abs_diff(std::span<const double>(cl).subspan(off, w), oracle.subspan(off, w));
      row[b + 1] = m;
      report.max_diff[b] = std::max(report.max_diff[b], m);
      off += w;
    }
  };
  report.series = integrate(tw.rhs, x_init, s.integration, rec).derived;
  return report;
}

}  // namespace mastrack
