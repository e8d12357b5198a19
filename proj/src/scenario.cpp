#include "mastrack/scenario.hpp"

#include <cmath>
#include <sstream>

#include "mastrack/second_order.hpp"

namespace mastrack {

const char* to_string(Order order) { return order == Order::First ? "first" : "second"; }

Order order_from_string(const std::string& name) {
  if (name == "first") return Order::First;
  if (name == "second") return Order::Second;
  throw ValidationError("order: expected \"first\" or \"second\", got \"" + name + "\"");
}

namespace {

void check_length(const std::string& path, const std::vector<double>& v, std::size_t n,
                  bool optional) {
  if (optional && v.empty()) return;
  if (v.size() != n) {
    std::ostringstream msg;
    msg << path << ": expected " << n << " entries, got " << v.size();
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw ValidationError(path + "[" + std::to_string(i) + "]: not finite");
}

void prefixed(const std::string& path, auto&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

void validate(const Scenario& s) {
  prefixed("topology", [&] { validate(s.topology); });
  const std::size_t n = s.n();
  validate(s.gains, n);
  if (s.signals.f.size() != n) {
    std::ostringstream msg;
    msg << "signals.f: expected " << n << " entries, got " << s.signals.f.size();
    throw ValidationError(msg.str());
  }
  if (!std::isfinite(s.init.x0)) throw ValidationError("init.x0: not finite");
  check_length("init.x", s.init.x, n, false);
  check_length("init.u_hat0", s.init.u_hat0, n, true);
  check_length("init.d", s.init.d, n, true);
  for (double di : s.init.d)
    if (di < 0.0) throw ValidationError("init.d: adaptive gains must be >= 0");
  check_length("init.z_f0", s.init.z_f0, n, true);
  check_length("init.z_f", s.init.z_f, n, true);
  if (s.order == Order::Second) {
    if (!std::isfinite(s.init.v0)) throw ValidationError("init.v0: not finite");
    check_length("init.v", s.init.v, n, false);
    check_length("init.z_v0", s.init.z_v0, n, true);
    check_length("init.z_v", s.init.z_v, n, true);
  } else {
    if (!s.init.v.empty() || !s.init.z_v0.empty() || !s.init.z_v.empty() || s.init.v0 != 0.0)
      throw ValidationError("init: velocity fields are only valid for order \"second\"");
  }
  prefixed("integration", [&] { validate(s.integration); });
}

namespace {

void place(std::vector<double>& flat, std::size_t offset, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) flat[offset + i] = v[i];
}

}  // namespace

std::vector<double> initial_state(const Scenario& s) {
  validate(s);
  const std::size_t n = s.n();
  const auto& in = s.init;
  if (s.order == Order::First) {
    const first_order::Layout lay{n};
    std::vector<double> flat(lay.dim(), 0.0);
    flat[lay.x0()] = in.x0;
    place(flat, lay.x(), in.x);
    place(flat, lay.u_hat0(), in.u_hat0);
    place(flat, lay.d(), in.d);
    place(flat, lay.z_f0(), in.z_f0);
    place(flat, lay.z_f(), in.z_f);
    return flat;
  }
  const second_order::Layout lay{n};
  std::vector<double> flat(lay.dim(), 0.0);
  flat[lay.x0()] = in.x0;
  flat[lay.v0()] = in.v0;
  place(flat, lay.x(), in.x);
  place(flat, lay.v(), in.v);
  place(flat, lay.u_hat0(), in.u_hat0);
  place(flat, lay.d(), in.d);
  place(flat, lay.z_v0(), in.z_v0);
  place(flat, lay.z_f0(), in.z_f0);
  place(flat, lay.z_v(), in.z_v);
  place(flat, lay.z_f(), in.z_f);
  return flat;
}

}  // namespace mastrack
