#include "mastrack/scenario_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef MASTRACK_FIXTURE_DIR
#define MASTRACK_FIXTURE_DIR "fixtures"
#endif

namespace mastrack {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

const json* optional(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const json* v = optional(obj, key);
  return v ? number(*v, join(path, key)) : fallback;
}

std::vector<double> numbers_or_empty(const json& obj, const std::string& key, const std::string& path) {
  const json* v = optional(obj, key);
  return v ? numbers(*v, join(path, key)) : std::vector<double>{};
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(join(path, key), "unknown field");
  }
}

SignalTerm term_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) fail(path, "expected a single-key term object");
  const auto& [key, val] = *j.items().begin();
  const std::string p = path + "." + key;
  if (key == "const") return ConstantTerm{number(val, p)};
  if (key == "ramp") return RampTerm{number(val, p)};
  if (key == "poly") return PolynomialTerm{numbers(val, p)};
  if (key == "cos") {
    if (!val.is_object()) fail(p, "expected an object");
    check_keys(val, p, {"amp", "omega", "phase"});
    return SinusoidTerm{number(require(val, "amp", p), p + ".amp"),
                        number(require(val, "omega", p), p + ".omega"),
                        number_or(val, "phase", p, 0.0)};
  }
  fail(p, "unknown signal term (expected const, ramp, cos or poly)");
}

}  // namespace

SignalSpec signal_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return SignalSpec::constant(j.get<double>());
  if (j.is_object() && j.size() == 1 && j.contains("sum")) {
    const json& terms = j["sum"];
    if (!terms.is_array()) fail(path + ".sum", "expected an array of terms");
    std::vector<SignalTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i)
      out.push_back(term_from_json(terms[i], path + ".sum[" + std::to_string(i) + "]"));
    return SignalSpec(std::move(out));
  }
  return SignalSpec({term_from_json(j, path)});
}

ordered_json signal_to_json(const SignalSpec& s) {
  ordered_json terms = ordered_json::array();
  for (const auto& term : s.terms()) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, ConstantTerm>) terms.push_back({{"const", t.value}});
          else if constexpr (std::is_same_v<T, RampTerm>) terms.push_back({{"ramp", t.slope}});
          else if constexpr (std::is_same_v<T, PolynomialTerm>) terms.push_back({{"poly", t.coefficients}});
          else
            terms.push_back(
                {{"cos", ordered_json{{"amp", t.amplitude}, {"omega", t.omega}, {"phase", t.phase}}}});
        },
        term);
  }
  return ordered_json{{"sum", terms}};
}

namespace {

Topology topology_from_json(const json& j) {
  const std::string path = "topology";
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"n_followers", "edges", "leader_links"});
  Topology t;
  t.n_followers = count(require(j, "n_followers", path), path + ".n_followers");
  if (const json* edges = optional(j, "edges")) {
    if (!edges->is_array()) fail(path + ".edges", "expected an array");
    for (std::size_t k = 0; k < edges->size(); ++k) {
      const std::string p = path + ".edges[" + std::to_string(k) + "]";
      const json& e = (*edges)[k];
      if (!e.is_array() || e.size() < 2 || e.size() > 3) fail(p, "expected [i, j] or [i, j, weight]");
      FollowerEdge edge{count(e[0], p + "[0]"), count(e[1], p + "[1]"), 1.0};
      if (e.size() == 3) edge.weight = number(e[2], p + "[2]");
      t.follower_edges.push_back(edge);
    }
  }
  if (const json* links = optional(j, "leader_links")) {
    if (!links->is_object()) fail(path + ".leader_links", "expected an object of id -> weight");
    for (const auto& [key, val] : links->items()) {
      const std::string p = path + ".leader_links." + key;
      char* end = nullptr;
      const long id = std::strtol(key.c_str(), &end, 10);
      if (key.empty() || *end != '\0' || id < 0) fail(p, "key must be a follower id");
      t.leader_links[static_cast<std::size_t>(id)] = number(val, p);
    }
  }
  return t;
}

Gains gains_from_json(const json& j, std::size_t n) {
  const std::string path = "gains";
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"k", "l", "tau"});
  Gains g;
  g.k = number(require(j, "k", path), "gains.k");
  g.l = number(require(j, "l", path), "gains.l");
  const json& tau = require(j, "tau", path);
  if (tau.is_number()) g.tau.assign(n, tau.get<double>());
  else g.tau = numbers(tau, "gains.tau");
  return g;
}

IntegrationConfig integration_from_json(const json* j) {
  IntegrationConfig c;
  if (!j) return c;
  const std::string path = "integration";
  if (!j->is_object()) fail(path, "expected an object");
  check_keys(*j, path, {"t_end", "dt", "method", "sgn_smoothing_epsilon", "record_stride"});
  c.t_end = number_or(*j, "t_end", path, c.t_end);
  c.dt = number_or(*j, "dt", path, c.dt);
  c.sgn_smoothing_epsilon = number_or(*j, "sgn_smoothing_epsilon", path, c.sgn_smoothing_epsilon);
  if (const json* m = optional(*j, "method")) {
    if (!m->is_string()) fail("integration.method", "expected a string");
    try {
      c.method = method_from_string(m->get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail("integration.method", e.what());
    }
  }
  if (const json* r = optional(*j, "record_stride")) c.record_stride = count(*r, "integration.record_stride");
  return c;
}

InitialState init_from_json(const json& j) {
  const std::string path = "init";
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"x0", "v0", "x", "v", "u_hat0", "d", "z_f0", "z_f", "z_v0", "z_v"});
  InitialState s;
  s.x0 = number(require(j, "x0", path), "init.x0");
  s.v0 = number_or(j, "v0", path, 0.0);
  s.x = numbers(require(j, "x", path), "init.x");
  s.v = numbers_or_empty(j, "v", path);
  s.u_hat0 = numbers_or_empty(j, "u_hat0", path);
  s.d = numbers_or_empty(j, "d", path);
  s.z_f0 = numbers_or_empty(j, "z_f0", path);
  s.z_f = numbers_or_empty(j, "z_f", path);
  s.z_v0 = numbers_or_empty(j, "z_v0", path);
  s.z_v = numbers_or_empty(j, "z_v", path);
  return s;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) fail("$", "expected an object");
  check_keys(j, "", {"name", "description", "order", "topology", "gains", "signals", "init",
                     "integration"});
  Scenario s;
  if (const json* v = optional(j, "name")) s.name = v->is_string() ? v->get<std::string>() : "";
  if (const json* v = optional(j, "description")) s.description = v->is_string() ? v->get<std::string>() : "";
  const json& order = require(j, "order", "");
  if (!order.is_string()) fail("order", "expected \"first\" or \"second\"");
  s.order = order_from_string(order.get<std::string>());
  s.topology = topology_from_json(require(j, "topology", ""));
  s.gains = gains_from_json(require(j, "gains", ""), s.topology.n_followers);

  const json& sig = require(j, "signals", "");
  if (!sig.is_object()) fail("signals", "expected an object");
  check_keys(sig, "signals", {"u0", "f0", "f"});
  s.signals.u0 = signal_from_json(require(sig, "u0", "signals"), "signals.u0");
  s.signals.f0 = signal_from_json(require(sig, "f0", "signals"), "signals.f0");
  const json& f = require(sig, "f", "signals");
  if (!f.is_array()) fail("signals.f", "expected an array of signals");
  for (std::size_t i = 0; i < f.size(); ++i)
    s.signals.f.push_back(signal_from_json(f[i], "signals.f[" + std::to_string(i) + "]"));

  s.init = init_from_json(require(j, "init", ""));
  s.integration = integration_from_json(optional(j, "integration"));
  validate(s);
  return s;
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json topo;
  topo["n_followers"] = s.topology.n_followers;
  topo["edges"] = ordered_json::array();
  for (const auto& e : s.topology.follower_edges) topo["edges"].push_back({e.i, e.j, e.weight});
  topo["leader_links"] = ordered_json::object();
  for (const auto& [id, w] : s.topology.leader_links) topo["leader_links"][std::to_string(id)] = w;

  ordered_json sig;
  sig["u0"] = signal_to_json(s.signals.u0);
  sig["f0"] = signal_to_json(s.signals.f0);
  sig["f"] = ordered_json::array();
  for (const auto& fi : s.signals.f) sig["f"].push_back(signal_to_json(fi));

  ordered_json init;
  init["x0"] = s.init.x0;
  if (s.order == Order::Second) init["v0"] = s.init.v0;
  init["x"] = s.init.x;
  auto put = [&](const char* key, const std::vector<double>& v) {
    if (!v.empty()) init[key] = v;
  };
  put("v", s.init.v);
  put("u_hat0", s.init.u_hat0);
  put("d", s.init.d);
  put("z_f0", s.init.z_f0);
  put("z_f", s.init.z_f);
  put("z_v0", s.init.z_v0);
  put("z_v", s.init.z_v);

  const auto& c = s.integration;
  ordered_json out;
  out["name"] = s.name;
  out["description"] = s.description;
  out["order"] = to_string(s.order);
  out["topology"] = topo;
  out["gains"] = ordered_json{{"k", s.gains.k}, {"l", s.gains.l}, {"tau", s.gains.tau}};
  out["signals"] = sig;
  out["init"] = init;
  out["integration"] = ordered_json{{"t_end", c.t_end},
                                    {"dt", c.dt},
                                    {"method", to_string(c.method)},
                                    {"sgn_smoothing_epsilon", c.sgn_smoothing_epsilon},
                                    {"record_stride", c.record_stride}};
  return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": parse error: " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write file");
  out << scenario_to_json(s).dump(2) << '\n';
}

std::string scenario_digest(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ordered_json certificate_to_json(const BoundCertificate& c) {
  ordered_json out;
  out["order"] = to_string(c.order);
  out["lambda_min_H"] = c.lambda_min_h;
  out["transient_bound"] = c.transient_bound;
  out["asymptotic_bound"] = c.asymptotic_bound;
  out["sub_bounds"] = ordered_json::object();
  for (const auto& [k, v] : c.sub_bounds) out["sub_bounds"][k] = v;
  ordered_json init{{"e", c.initial.e}, {"e_u", c.initial.e_u}, {"e_0f", c.initial.e_0f},
                    {"e_f", c.initial.e_f}};
  if (c.order == Order::Second) {
    init["e_0vf"] = c.initial.e_0vf;
    init["e_vf"] = c.initial.e_vf;
  }
  out["inputs"] = ordered_json{{"q0", c.rates.q0}, {"q1", c.rates.q1}, {"w", c.rates.w},
                               {"k", c.k}, {"l", c.l}, {"initial_error_norms", init}};
  return out;
}

ordered_json report_to_json(const VerificationReport& r) {
  ordered_json claims = ordered_json::array();
  for (const auto& c : r.claims)
    claims.push_back({{"name", c.name}, {"pass", c.pass}, {"observed", c.observed},
                      {"bound", c.bound}, {"margin", c.margin()}});
  return ordered_json{{"all_pass", r.all_pass()}, {"claims", claims}};
}

std::string format_table_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.width(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.width(); ++c) {
      std::snprintf(buf, sizeof buf, c ? ",%.17g" : "%.17g", table.at(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void export_table(const Table& table, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path.string() + ": cannot write file");
  f << format_table_csv(table);
  f.close();
  if (!f) throw std::runtime_error(path.string() + ": write failed");
}

void export_trace(const SimTrace& trace, const std::filesystem::path& path) {
  export_table(trace.derived, path);
}

Table read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cells = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      t.values.push_back(v);
      ++cells;
    }
    if (cells != t.width())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
  }
  return t;
}

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("MAS_TRACK_FIXTURES"); env && *env) return env;
  return MASTRACK_FIXTURE_DIR;
}

Scenario load_fixture(const std::string& file_name) { return load_scenario(fixture_dir() / file_name); }

}  // namespace mastrack
