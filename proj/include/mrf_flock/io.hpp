#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "mrf_flock/errors.hpp"
#include "mrf_flock/simulation.hpp"

namespace mrf_flock {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view key, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'", line);
  }
  return value;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, std::string_view, std::size_t)>;

template <typename T>
Setter bind(T ScenarioConfig::*member) {
  return [member](ScenarioConfig& c, std::string_view key, std::string_view v, std::size_t line) {
    c.*member = parse_number<T>(v, key, line);
  };
}

template <typename Fn>
Setter bind_double(Fn&& fn) {
  return [fn](ScenarioConfig& c, std::string_view key, std::string_view v, std::size_t line) {
    fn(c, parse_number<double>(v, key, line));
  };
}

/// Recognized keys. Shared scalars (t_p, u_max) are written to every
/// sub-config that carries them.
inline const std::map<std::string, Setter, std::less<>>& config_setters() {
  static const std::map<std::string, Setter, std::less<>> setters = {
      {"k", [](ScenarioConfig& c, std::string_view key, std::string_view v, std::size_t line) {
         c.controller.k = parse_number<std::size_t>(v, key, line);
       }},
      {"a", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.a = v; })},
      {"b", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.b = v; })},
      {"k_a", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_a = v; })},
      {"k_r", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_r = v; })},
      {"k_l", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_l = v; })},
      {"k_c", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_c = v; })},
      {"k_d", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_d = v; })},
      {"k_v", bind_double([](ScenarioConfig& c, double v) { c.controller.potentials.k_v = v; })},
      {"n_a", [](ScenarioConfig& c, std::string_view key, std::string_view v, std::size_t line) {
         c.controller.discretization.n_a = parse_number<int>(v, key, line);
       }},
      {"delta_u", bind_double([](ScenarioConfig& c, double v) { c.controller.discretization.delta_u = v; })},
      {"t_p", bind_double([](ScenarioConfig& c, double v) {
         c.controller.discretization.t_p = v;
         c.controller.potentials.t_p = v;
       })},
      {"u_max", bind_double([](ScenarioConfig& c, double v) {
         c.controller.discretization.u_max = v;
         c.controller.bounds.u_max = v;
       })},
      {"v_max", bind_double([](ScenarioConfig& c, double v) { c.controller.bounds.v_max = v; })},
      {"r_coll", bind_double([](ScenarioConfig& c, double v) { c.controller.bounds.r_coll = v; })},
      {"alpha", bind_double([](ScenarioConfig& c, double v) { c.controller.alpha = v; })},
      {"iterations", [](ScenarioConfig& c, std::string_view key, std::string_view v, std::size_t line) {
         c.controller.iterations = parse_number<int>(v, key, line);
       }},
      {"epsilon_converge", bind_double([](ScenarioConfig& c, double v) { c.controller.epsilon_converge = v; })},
      {"w_a", bind_double([](ScenarioConfig& c, double v) { c.controller.weights.attract_repulse = v; })},
      {"w_align", bind_double([](ScenarioConfig& c, double v) { c.controller.weights.align = v; })},
      {"w_acc", bind_double([](ScenarioConfig& c, double v) { c.controller.weights.acc = v; })},
      {"w_vel", bind_double([](ScenarioConfig& c, double v) { c.controller.weights.vel = v; })},
      {"dt", bind(&ScenarioConfig::dt)},
      {"v_leader", bind(&ScenarioConfig::leader_speed)},
      {"n_agents", bind(&ScenarioConfig::n_agents)},
      {"steps", bind(&ScenarioConfig::steps)},
      {"gather_duration", bind(&ScenarioConfig::gather_duration)},
      {"s_curve_amplitude", bind(&ScenarioConfig::s_curve_amplitude)},
      {"s_curve_period", bind(&ScenarioConfig::s_curve_period)},
      {"spawn_radius", bind(&ScenarioConfig::spawn_radius)},
      {"rng_seed", bind(&ScenarioConfig::rng_seed)},
  };
  return setters;
}

}  // namespace detail

/// Reads `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are skipped. The result is validated.
inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {}) {
  const auto& setters = detail::config_setters();
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    if (value.empty()) throw ConfigError("missing value for key '" + std::string(key) + "'", line_no);
    it->second(base, key, value, line_no);
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const NoMinimum& e) {
    throw ConfigError(e.what());
  }
  return base;
}

inline ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void write_trajectory_csv(std::ostream& out, const SimulationLog& log) {
  out << "t,agent_id,px,py,vx,vy,ux,uy\n";
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    const std::string t = format_double(log.times[f]);
    for (std::size_t i = 0; i < log.frames[f].size(); ++i) {
      const auto& s = log.frames[f][i];
      out << t << ',' << i << ',' << format_double(s.position.x()) << ',' << format_double(s.position.y()) << ','
          << format_double(s.velocity.x()) << ',' << format_double(s.velocity.y()) << ','
          << format_double(s.last_input.x()) << ',' << format_double(s.last_input.y()) << '\n';
    }
  }
}

inline void write_metrics_csv(std::ostream& out, const SimulationLog& log) {
  out << "t,order,d_min,d_max,d_avg\n";
  for (const auto& m : log.metrics) {
    out << format_double(m.t) << ',' << format_double(m.order) << ',' << format_double(m.distance.d_min) << ','
        << format_double(m.distance.d_max) << ',' << format_double(m.distance.d_avg) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const SimulationLog& log) {
  out << "agent_id,u_avg,traj_length\n";
  for (std::size_t i = 0; i < log.summary.size(); ++i) {
    out << i << ',' << format_double(log.summary[i].u_avg) << ',' << format_double(log.summary[i].traj_length) << '\n';
  }
}

/// Writes trajectory.csv, metrics.csv and summary.csv into `dir`.
inline void write_outputs(const std::filesystem::path& dir, const SimulationLog& log) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const char* name, void (*fn)(std::ostream&, const SimulationLog&)) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    fn(out, log);
    if (!out) throw std::runtime_error("write failed for " + (dir / name).string());
  };
  write("trajectory.csv", write_trajectory_csv);
  write("metrics.csv", write_metrics_csv);
  write("summary.csv", write_summary_csv);
}

}  // namespace mrf_flock
