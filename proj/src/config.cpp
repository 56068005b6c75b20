#include "dftr/config.hpp"

#include "dftr/errors.hpp"
#include "dftr/text.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace dftr {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"reactor", {"d_ax", "peclet", "v", "k", "n", "l", "t_final", "sat_m"}},
      {"control", {"alpha", "u_bar"}},
      {"grid", {"num_nodes"}},
      {"time", {"dt", "record_every", "snapshot_times"}},
      {"analysis", {"rho0", "gamma", "horizon", "window_fraction", "floor"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_decimal(const std::string& text, const std::string& where) {
  const std::string value = trim(text);
  errno = 0;
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE ||
      !std::isfinite(parsed)) {
    throw ConfigError(where + ": '" + value + "' is not a finite decimal");
  }
  return parsed;
}

long parse_integer(const std::string& text, const std::string& where) {
  const double value = parse_decimal(text, where);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw ConfigError(where + ": '" + trim(text) + "' is not an integer");
  }
  return static_cast<long>(value);
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_decimal(item, where));
  if (values.empty()) throw ConfigError(where + ": empty list");
  return values;
}

}  // namespace

const std::string* ConfigDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

ConfigDocument parse_config(const std::string& text) {
  ConfigDocument doc;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(number);

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().contains(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().at(section).contains(key)) {
      throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    }
    if (doc.sections[section].contains(key)) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    doc.sections[section][key] = value;
  }
  return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

SimulationConfig RunSettings::resolved_simulation() const {
  SimulationConfig config = simulation;
  config.params.sat_m = sat_m.value_or(default_saturation_bound(config.params, config.law.alpha));
  return config;
}

RunSettings default_settings() {
  RunSettings s;
  auto& p = s.simulation.params;
  p.v = 0.01;
  p.l = 1.0;
  p.d_ax = d_ax_from_peclet(p.v, p.l, 4.0);
  p.k = 0.001;
  p.n = 1.0;
  p.t_final = 400.0;
  s.simulation.law = FeedbackLaw{0.0, 1.0};
  s.simulation.grid = SpatialGrid(p.l, 201);
  s.simulation.dt = 0.1;
  s.simulation.record_every = 10;
  return s;
}

RunSettings resolve_settings(const ConfigDocument& doc) {
  RunSettings s = default_settings();
  auto& p = s.simulation.params;

  auto required = [&](const char* key) {
    const std::string* value = doc.find("reactor", key);
    if (!value) throw ConfigError(std::string("missing required key '") + key + "' in [reactor]");
    return parse_decimal(*value, std::string("reactor.") + key);
  };
  auto optional = [&](const char* section, const char* key, auto&& apply) {
    if (const std::string* value = doc.find(section, key)) {
      apply(*value, std::string(section) + "." + key);
    }
  };

  p.v = required("v");
  p.k = required("k");
  p.n = required("n");
  p.l = required("l");
  const std::string* d_ax = doc.find("reactor", "d_ax");
  const std::string* peclet = doc.find("reactor", "peclet");
  if ((d_ax != nullptr) == (peclet != nullptr)) {
    throw ConfigError("[reactor] needs exactly one of 'd_ax' or 'peclet'");
  }
  try {
    p.d_ax = d_ax ? parse_decimal(*d_ax, "reactor.d_ax")
                  : d_ax_from_peclet(p.v, p.l, parse_decimal(*peclet, "reactor.peclet"));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  optional("reactor", "t_final", [&](auto& v, auto w) { p.t_final = parse_decimal(v, w); });
  optional("reactor", "sat_m", [&](auto& v, auto w) { s.sat_m = parse_decimal(v, w); });
  optional("control", "alpha", [&](auto& v, auto w) { s.simulation.law.alpha = parse_decimal(v, w); });
  optional("control", "u_bar", [&](auto& v, auto w) { s.simulation.law.u_bar = parse_decimal(v, w); });
  long nodes = 201;
  optional("grid", "num_nodes", [&](auto& v, auto w) { nodes = parse_integer(v, w); });
  optional("time", "dt", [&](auto& v, auto w) { s.simulation.dt = parse_decimal(v, w); });
  optional("time", "record_every", [&](auto& v, auto w) {
    s.simulation.record_every = static_cast<int>(parse_integer(v, w));
  });
  optional("time", "snapshot_times", [&](auto& v, auto w) { s.snapshot_times = parse_list(v, w); });
  optional("analysis", "rho0", [&](auto& v, auto w) { s.simulation.rho0 = parse_decimal(v, w); });
  optional("analysis", "gamma", [&](auto& v, auto w) { s.simulation.gamma = parse_decimal(v, w); });
  optional("analysis", "horizon", [&](auto& v, auto w) { s.horizon = parse_decimal(v, w); });
  optional("analysis", "window_fraction",
           [&](auto& v, auto w) { s.estimator.window_fraction = parse_decimal(v, w); });
  optional("analysis", "floor", [&](auto& v, auto w) { s.estimator.floor = parse_decimal(v, w); });

  try {
    s.simulation.grid = SpatialGrid(p.l, nodes);
    validate(s.resolved_simulation());
    if (!(s.horizon > 0.0)) throw ConfigError("analysis.horizon must be positive");
    SimulationConfig long_run = s.resolved_simulation();
    long_run.params.t_final = s.horizon;
    validate(long_run);
    if (!(s.estimator.window_fraction > 0.0 && s.estimator.window_fraction <= 1.0)) {
      throw ConfigError("analysis.window_fraction must lie in (0, 1]");
    }
    if (!(s.estimator.floor >= 0.0)) throw ConfigError("analysis.floor must be non-negative");
    config_weight(s.simulation);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string canonical_text(const RunSettings& s) {
  const SimulationConfig c = s.resolved_simulation();
  const auto& p = c.params;
  std::string text;
  auto add = [&](const char* key, double value) {
    text += key;
    text += '=';
    text += format_g17(value);
    text += '\n';
  };
  add("d_ax", p.d_ax);
  add("v", p.v);
  add("k", p.k);
  add("n", p.n);
  add("l", p.l);
  add("t_final", p.t_final);
  add("sat_m", s.sat_m.value_or(-1.0));
  add("alpha", c.law.alpha);
  add("u_bar", c.law.u_bar);
  add("num_nodes", static_cast<double>(c.grid.size()));
  add("dt", c.dt);
  add("record_every", c.record_every);
  add("rho0", c.rho0);
  add("gamma", c.gamma.value_or(default_weight_rate(p)));
  add("horizon", s.horizon);
  add("window_fraction", s.estimator.window_fraction);
  add("floor", s.estimator.floor);
  for (double t : s.snapshot_times) add("snapshot", t);
  return text;
}

}  // namespace dftr
