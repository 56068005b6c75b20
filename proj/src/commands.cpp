#include "dftr/commands.hpp"

#include "dftr/analysis.hpp"
#include "dftr/errors.hpp"
#include "dftr/mild_solution.hpp"
#include "dftr/operator.hpp"
#include "dftr/steady_state.hpp"
#include "dftr/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace dftr {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `# manifest <hash>`, the header row and then data rows.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& hash, const std::string& header)
      : path_(path), stream_(path, std::ios::binary) {
    if (!stream_) throw OutputError("cannot write " + path.string());
    stream_ << "# manifest " << hash << '\n' << header << '\n';
  }
  ~CsvWriter() { stream_.flush(); }

  CsvWriter& operator<<(const std::string& row) {
    stream_ << row << '\n';
    return *this;
  }

 private:
  fs::path path_;
  std::ofstream stream_;
};

std::string join(std::initializer_list<std::string> fields) {
  std::string row;
  for (const auto& f : fields) {
    if (!row.empty()) row += ',';
    row += f;
  }
  return row;
}

std::string g17(double value) { return format_g17(value + 0.0); }

std::string list_text(const std::vector<double>& values) {
  std::string text;
  for (double v : values) text += (text.empty() ? "" : ",") + g17(v);
  return text;
}

double rel_l2(const SpatialGrid& grid, const Vector& a, const Vector& reference) {
  const Vector diff = a - reference;
  const double ref = std::sqrt(inner_product(grid, reference, reference));
  return std::sqrt(inner_product(grid, diff, diff)) / (ref > 0.0 ? ref : 1.0);
}

/// Shared state of a command invocation.
struct Session {
  const CliRequest& request;
  const RunSettings& settings;
  std::string hash;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  template <class F>
  auto timed(const char* phase, F&& f) {
    const auto start = Clock::now();
    struct Record {
      Session* s;
      const char* phase;
      Clock::time_point start;
      ~Record() {
        s->timings[phase] = std::chrono::duration<double>(Clock::now() - start).count();
      }
    } record{this, phase, start};
    return f();
  }

  fs::path file(const char* name) const { return request.out_dir / name; }
};

std::string hash_text(const CliRequest& request, const RunSettings& settings) {
  std::string text = canonical_text(settings);
  text += "version=" + std::string(kToolkitVersion) + "\n";
  text += "command=" + request.command + "\n";
  if (request.command == "sweep") {
    text += "n_list=" + list_text(request.n_list) + "\n";
    text += "alpha_list=" + list_text(request.alpha_list) + "\n";
  }
  if (request.command == "verify") text += "seed=" + std::to_string(request.seed) + "\n";
  return text;
}

nlohmann::ordered_json settings_json(const RunSettings& settings) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::istringstream lines(canonical_text(settings));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    const double value = std::stod(line.substr(eq + 1));
    if (key == "snapshot") {
      params["snapshot_times"].push_back(value);
    } else {
      params[key] = value;
    }
  }
  params["sat_m"] = settings.resolved_simulation().params.sat_m;
  return params;
}

void write_manifest(const Session& s, int exit_code, double total_seconds) {
  nlohmann::ordered_json m;
  m["toolkit_version"] = kToolkitVersion;
  m["command"] = s.request.command;
  m["config_path"] = s.request.config_path ? nlohmann::ordered_json(s.request.config_path->string())
                                           : nlohmann::ordered_json(nullptr);
  m["output_directory"] = s.request.out_dir.string();
  m["manifest_hash"] = s.hash;
  m["parameters"] = settings_json(s.settings);
  for (const auto& [key, value] : s.extra.items()) m[key] = value;
  m["exit_code"] = exit_code;
  m["timings_seconds"] = s.timings;
  m["timings_seconds"]["total"] = total_seconds;
  std::ofstream out(s.file("manifest.json"), std::ios::binary);
  if (!out) throw OutputError("cannot write manifest.json");
  out << m.dump(2) << '\n';
}

SteadyStateSolution solve_steady(Session& s, const SimulationConfig& config) {
  return s.timed("steady_state", [&] {
    return steady_state_numeric(config.params, config.law.u_bar, config.grid);
  });
}

int cmd_steady(Session& s, std::ostream& out) {
  const SimulationConfig config = s.settings.resolved_simulation();
  const SteadyStateSolution steady = solve_steady(s, config);
  const SpatialGrid& grid = config.grid;
  {
    CsvWriter csv(s.file("steady.csv"), s.hash, "x,c_bar");
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      csv << join({g17(grid.node(i)), g17(steady.profile.values[i])});
    }
  }
  out << "steady state: " << grid.size() << " nodes, " << steady.iterations
      << " Newton iterations, residual " << g17(steady.residual_norm) << '\n';
  if (!steady.nonnegative) out << "warning: steady state has negative nodes\n";

  if (std::abs(config.params.n - 1.0) <= 1e-12) {
    const Profile analytic = steady_state_analytic_n1(config.params, config.law.u_bar).sample(grid);
    CsvWriter csv(s.file("steady_analytic.csv"), s.hash, "x,c_bar");
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      csv << join({g17(grid.node(i)), g17(analytic.values[i])});
    }
    const double scale = analytic.values.cwiseAbs().maxCoeff();
    const double discrepancy =
        (steady.profile.values - analytic.values).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
    s.extra["max_relative_discrepancy"] = discrepancy;
    char line[96];
    std::snprintf(line, sizeof line, "max relative discrepancy vs analytic: %.3e\n", discrepancy);
    out << line;
  }
  return kExitOk;
}

/// Index of the record closest to t.
std::size_t nearest_record(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto j = static_cast<std::size_t>(it - times.begin());
  return (t - times[j - 1] <= times[j] - t) ? j - 1 : j;
}

int cmd_simulate(Session& s, std::ostream& out) {
  const SimulationConfig config = s.settings.resolved_simulation();
  const SteadyStateSolution steady = solve_steady(s, config);
  const Profile w0 = initial_profile(config.grid, config.params, config.law);
  const Trajectory traj = s.timed("integration", [&] { return simulate(config, steady, w0); });
  const SpatialGrid& grid = config.grid;

  s.timed("output", [&] {
    {
      CsvWriter csv(s.file("trajectory.csv"), s.hash, "t,x,w");
      for (std::size_t j = 0; j < traj.times.size(); ++j) {
        const std::string t = g17(traj.times[j]);
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          csv << join({t, g17(grid.node(i)), g17(traj.profiles[j][i])});
        }
      }
    }
    {
      CsvWriter csv(s.file("control.csv"), s.hash, "t,u_w");
      for (std::size_t j = 0; j < traj.times.size(); ++j) {
        csv << join({g17(traj.times[j]), g17(traj.control[j])});
      }
    }
    {
      CsvWriter csv(s.file("energy.csv"), s.hash, "t,energy,norm_rho");
      for (std::size_t j = 0; j < traj.times.size(); ++j) {
        csv << join({g17(traj.times[j]), g17(traj.energy[j]), g17(std::sqrt(2.0 * traj.energy[j]))});
      }
    }
    {
      // Snapshots beyond the horizon are skipped; others use the nearest record.
      CsvWriter csv(s.file("profiles.csv"), s.hash, "t,x,w");
      for (double t : s.settings.snapshot_times) {
        if (t < 0.0 || t > config.params.t_final) continue;
        const std::size_t j = nearest_record(traj.times, t);
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          csv << join({g17(traj.times[j]), g17(grid.node(i)), g17(traj.profiles[j][i])});
        }
      }
    }
    return 0;
  });

  out << "simulated " << traj.times.size() << " records to t = " << g17(traj.times.back())
      << " s; final max|w| = " << g17(traj.profiles.back().cwiseAbs().maxCoeff()) << '\n';
  if (traj.negativity_events > 0) {
    out << "warning: concentration went negative at " << traj.negativity_events << " node-steps\n";
  }
  s.extra["negativity_events"] = traj.negativity_events;
  return kExitOk;
}

int cmd_sweep(Session& s, std::ostream& out, std::ostream& err) {
  if (s.request.n_list.empty() || s.request.alpha_list.empty()) {
    throw ConfigError("sweep needs non-empty --n-list and --alpha-list");
  }
  SweepSettings sweep_settings;
  sweep_settings.horizon = s.settings.horizon;
  sweep_settings.estimator = s.settings.estimator;
  sweep_settings.sat_m = s.settings.sat_m;
  sweep_settings.threads = std::max(1u, s.request.threads);
  const SweepResult result = s.timed("sweep", [&] {
    return sweep(s.settings.simulation, s.request.n_list, s.request.alpha_list, sweep_settings);
  });
  const double lambda_t = lambda_theoretical(s.settings.simulation.params);

  std::size_t failures = 0;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  {
    CsvWriter csv(s.file("sweep.csv"), s.hash, "n,alpha,lambda_n,lambda_t,fit_r2,floor_hit");
    for (const SweepCell& cell : result.cells) {
      std::string lambda_n;
      std::string r2;
      std::string floor_hit;
      if (cell.estimate) {
        if (cell.estimate->lambda_n) {
          lambda_n = g17(*cell.estimate->lambda_n);
          r2 = g17(cell.estimate->fit_r2);
        }
        floor_hit = cell.estimate->floor_hit ? "true" : "false";
      } else {
        ++failures;
        err << "cell n=" << g17(cell.n) << " alpha=" << g17(cell.alpha) << " failed: " << cell.error << '\n';
      }
      csv << join({g17(cell.n), g17(cell.alpha), lambda_n, g17(lambda_t), r2, floor_hit});
      cells.push_back({{"n", cell.n}, {"alpha", cell.alpha}, {"error", cell.error},
                       {"provenance", cell.provenance}});
    }
  }
  s.extra["n_list"] = s.request.n_list;
  s.extra["alpha_list"] = s.request.alpha_list;
  s.extra["cells"] = cells;

  char buffer[64];
  out << "estimated decay rate lambda_N [1/s], lambda_T = " << g17(lambda_t) << "\n";
  std::snprintf(buffer, sizeof buffer, "%8s", "n\\alpha");
  out << buffer;
  for (double a : result.alpha_values) {
    std::snprintf(buffer, sizeof buffer, "%10g", a);
    out << buffer;
  }
  out << '\n';
  for (std::size_t i = 0; i < result.n_values.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%8g", result.n_values[i]);
    out << buffer;
    for (std::size_t j = 0; j < result.alpha_values.size(); ++j) {
      const SweepCell& cell = result.at(i, j);
      if (cell.estimate && cell.estimate->lambda_n) {
        std::snprintf(buffer, sizeof buffer, "%10.4f", *cell.estimate->lambda_n);
      } else {
        std::snprintf(buffer, sizeof buffer, "%10s", cell.estimate ? "floor" : "failed");
      }
      out << buffer;
    }
    out << '\n';
  }
  return failures == result.cells.size() ? kExitSweep : kExitOk;
}

int cmd_verify(Session& s, std::ostream& out, std::ostream& err) {
  const std::vector<VerifyRow> rows =
      s.timed("verify", [&] { return verify_checks(s.settings, s.request.seed); });
  bool failed = false;
  {
    CsvWriter csv(s.file("verify.csv"), s.hash, "check,metric,value,threshold,pass");
    for (const VerifyRow& row : rows) {
      csv << join({row.check, row.metric, row.value ? g17(*row.value) : "", g17(row.threshold), row.pass});
      failed = failed || row.pass == "false";
    }
  }
  for (const VerifyRow& row : rows) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, "%-26s %-28s %12.4e  <= %-10.3g %s\n", row.check.c_str(),
                  row.metric.c_str(), row.value.value_or(std::nan("")), row.threshold, row.pass.c_str());
    out << buffer;
    if (!row.note.empty()) err << row.check << ": " << row.note << '\n';
  }
  return failed ? kExitVerify : kExitOk;
}

}  // namespace

RunSettings load_settings(const std::optional<std::filesystem::path>& config_path) {
  return config_path ? resolve_settings(load_config(*config_path)) : default_settings();
}

std::vector<VerifyRow> verify_checks(const RunSettings& settings, std::uint64_t seed) {
  const SimulationConfig config = settings.resolved_simulation();
  const ReactorParams& params = config.params;
  const double alpha = config.law.alpha;
  std::vector<VerifyRow> rows;

  auto verdict = [](bool ok) { return std::string(ok ? "true" : "false"); };
  // Runs `body`; on an exception the listed rows are recorded as failed.
  auto guarded = [&](std::vector<std::pair<const char*, const char*>> names, double threshold,
                     const std::function<void()>& body) {
    const std::size_t before = rows.size();
    try {
      body();
    } catch (const std::exception& e) {
      rows.resize(before);
      for (const auto& [check, metric] : names) {
        rows.push_back({check, metric, std::nullopt, threshold, "false", e.what()});
      }
    }
  };

  guarded({{"dissipativity", "max_form_over_norm_sq"}, {"dissipativity_inlet_term", "max_inlet_term"}},
          1e-8, [&] {
            const DiscreteGenerator gen = build_generator(config.grid, params, alpha);
            double worst = -std::numeric_limits<double>::infinity();
            double inlet = -std::numeric_limits<double>::infinity();
            for (std::uint64_t i = 0; i < 100; ++i) {
              const Profile xi = random_domain_vector(gen, seed + i);
              const DissipativityReport report = dissipativity_form(gen, xi);
              worst = std::max(worst, report.form / inner_product(config.grid, xi.values, xi.values));
              inlet = std::max(inlet, report.inlet_term);
            }
            rows.push_back({"dissipativity", "max_form_over_norm_sq", worst, 1e-8, verdict(worst <= 1e-8), ""});
            rows.push_back({"dissipativity_inlet_term", "max_inlet_term", inlet + 0.0, 0.0,
                            verdict(inlet <= 0.0), ""});
          });

  guarded({{"resolvent_error", "max_rel_l2"}, {"resolvent_order", "max_order_deviation"}}, 1e-3, [&] {
    const std::size_t n = config.grid.size();
    const std::array<std::size_t, 3> sizes{(n - 1) / 2 + 1, n, 2 * n - 1};
    const bool resolved = sizes[0] >= 21;
    double max_error = 0.0;
    double worst_order = 2.0;
    for (double lambda : {0.1, 1.0, 10.0}) {
      std::array<double, 3> errors{};
      std::array<double, 3> spacing{};
      for (std::size_t g = 0; g < 3; ++g) {
        const SpatialGrid grid(params.l, sizes[g]);
        const Profile eta(grid, Vector::Ones(static_cast<Eigen::Index>(grid.size())));
        const ResolventSolution exact = resolvent_analytic(eta, lambda, params, alpha);
        const Profile discrete = resolvent_discrete(build_generator(grid, params, alpha), eta, lambda);
        errors[g] = rel_l2(grid, discrete.values, exact.xi.values);
        spacing[g] = grid.spacing();
      }
      max_error = std::max(max_error, errors[2]);
      for (std::size_t g = 0; g + 1 < 3; ++g) {
        const double order = std::log(errors[g] / errors[g + 1]) / std::log(spacing[g] / spacing[g + 1]);
        if (!(std::abs(order - 2.0) <= std::abs(worst_order - 2.0))) worst_order = order;
      }
    }
    const std::string guard = "insufficient-resolution";
    const std::string note = resolved ? "" : "coarsest grid has " + std::to_string(sizes[0]) + " nodes";
    rows.push_back({"resolvent_error", "max_rel_l2", max_error, 1e-3,
                    resolved ? verdict(max_error <= 1e-3) : guard, note});
    const double deviation = std::abs(worst_order - 2.0);
    rows.push_back({"resolvent_order", "max_order_deviation", deviation, 0.3,
                    resolved ? verdict(deviation <= 0.3) : guard,
                    note.empty() ? "worst observed order " + format_g17(worst_order) : note});
  });

  // Mild solution on a small grid where the dense exponential is affordable.
  auto duhamel = [&](const char* check, double k, double threshold) {
    guarded({{check, "rel_l2"}}, threshold, [&] {
      SimulationConfig small = config;
      small.grid = SpatialGrid(params.l, 51);
      small.params.k = k;
      small.params.t_final = std::max(1.0, std::round(50.0 / config.dt)) * config.dt;
      small.record_every = 1;
      const SteadyStateSolution steady =
          steady_state_numeric(small.params, small.law.u_bar, small.grid);
      const Profile w0 = initial_profile(small.grid, small.params, small.law);
      const Trajectory traj = simulate(small, steady, w0);
      const DiscreteGenerator gen = build_generator(small.grid, small.params, alpha);
      const int steps = static_cast<int>(std::lround(small.params.t_final / 0.1));
      const Profile mild =
          duhamel_oracle(gen, w0, steady, small.params, small.params.t_final, std::max(steps, 1));
      const double error = rel_l2(small.grid, traj.profiles.back(), mild.values);
      rows.push_back({check, "rel_l2", error, threshold, verdict(error <= threshold), ""});
    });
  };
  duhamel("duhamel_nonlinear", params.k, 1e-2);
  duhamel("duhamel_linear", 0.0, 1e-4);

  guarded({{"equilibrium", "max_abs_w"}}, 1e-9, [&] {
    const SteadyStateSolution steady = steady_state_numeric(params, config.law.u_bar, config.grid);
    const Trajectory traj = simulate(config, steady, Profile::zeros(config.grid));
    double worst = 0.0;
    for (const auto& w : traj.profiles) worst = std::max(worst, w.cwiseAbs().maxCoeff());
    rows.push_back({"equilibrium", "max_abs_w", worst, 1e-9, verdict(worst <= 1e-9), ""});
  });

  guarded({{"energy_nonincreasing", "max_energy_ratio"}, {"exponential_envelope", "max_envelope_ratio"}},
          1.0 + 1e-10, [&] {
            const SteadyStateSolution steady = steady_state_numeric(params, config.law.u_bar, config.grid);
            const Trajectory traj = simulate(config, steady, initial_profile(config.grid, params, config.law));
            const LyapunovDiagnostics d = lyapunov_check(traj, config_weight(config), lambda_theoretical(params));
            rows.push_back({"energy_nonincreasing", "max_energy_ratio", d.max_energy_ratio, 1.0 + 1e-10,
                            verdict(d.max_energy_ratio <= 1.0 + 1e-10), ""});
            rows.push_back({"exponential_envelope", "max_envelope_ratio", d.max_envelope_ratio, 1.01,
                            verdict(d.max_envelope_ratio <= 1.01), ""});
          });
  return rows;
}

int run(const CliRequest& request, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  RunSettings settings;
  try {
    settings = load_settings(request.config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::error_code ec;
  fs::create_directories(request.out_dir, ec);
  if (ec) {
    err << "cannot create output directory " << request.out_dir.string() << ": " << ec.message() << '\n';
    return kExitConfig;
  }

  Session session{request, settings, hex64(fnv1a64(hash_text(request, settings)))};
  int code = kExitOk;
  try {
    if (request.command == "steady") {
      code = cmd_steady(session, out);
    } else if (request.command == "simulate") {
      code = cmd_simulate(session, out);
    } else if (request.command == "sweep") {
      code = cmd_sweep(session, out, err);
    } else if (request.command == "verify") {
      code = cmd_verify(session, out, err);
    } else {
      err << "unknown command '" << request.command << "'\n";
      return kExitConfig;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const SolverError& e) {
    err << "steady state failed: " << e.what() << " (last residual " << g17(e.last_residual()) << ")\n";
    code = kExitSteady;
  } catch (const IntegrationError& e) {
    err << "integration failed at step " << e.step() << ": " << e.what() << '\n';
    code = kExitIntegration;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    code = kExitConfig;
  } catch (const ContractError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    code = kExitConfig;
  }

  try {
    write_manifest(session, code, std::chrono::duration<double>(Clock::now() - start).count());
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
  }
  return code;
}

}  // namespace dftr
