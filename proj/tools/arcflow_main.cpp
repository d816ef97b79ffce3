#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "arcflow/errors.hpp"
#include "arcflow/experiment.hpp"
#include "arcflow/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace arcflow;

namespace {

constexpr int kUsage = 2;

struct Globals {
  std::string out_dir;
  bool frames = false;
  bool quiet = false;
};

// A path to a JSON config, or the name of a builtin preset.
ExperimentConfig resolve(const std::string& arg, json* doc = nullptr) {
  if (!fs::exists(arg)) {
    for (const auto& p : preset_names()) {
      if (p == arg) {
        auto c = preset(arg);
        if (doc) *doc = to_json(c);
        return c;
      }
    }
    throw ConfigError("(document)", "no such file or preset: " + arg);
  }
  std::ifstream in(arg, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_config_text(ss.str());
  if (doc) *doc = json::parse(ss.str());
  return c;
}

void apply_globals(ExperimentConfig& c, const Globals& g) {
  if (!g.out_dir.empty()) c.output.dir = g.out_dir;
  if (g.frames) c.output.frames = true;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int cmd_run(const std::string& arg, const Globals& g) {
  auto cfg = resolve(arg);
  apply_globals(cfg, g);
  const auto o = run_experiment(cfg, {true, g.quiet});
  if (!g.quiet) {
    fmt::print("config_hash {}  seed {}\n", o.config_hash, cfg.seed);
    fmt::print("termination {} after {} steps, t = {:.6g}\n", to_string(o.run.termination),
               o.run.final_state.step_index, o.run.final_state.t);
    if (o.admissibility) fmt::print("admissible {}\n", o.admissibility->admissible());
    if (o.final_fit && !o.final_fit->line) {
      fmt::print("final arc radius {:.9g}, rms {:.3g}\n", o.final_fit->radius, o.final_fit->rms);
    }
    fmt::print("invariant violations {}\n", o.invariant_violations);
    fmt::print("outputs in {}\n", cfg.output.dir);
  }
  return o.exit_code;
}

int cmd_check(const std::string& arg, const Globals& g) {
  auto cfg = resolve(arg);
  apply_globals(cfg, g);
  const auto sigma = build_support(cfg.support);
  const auto state = build_initial_state(cfg, sigma);
  if (!state.attached) throw InvalidInput("admissibility needs an open curve with endpoints on the support");
  const auto rep = check_admissibility(state.curve, sigma);
  json j = admissibility_json(rep);
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  fs::create_directories(cfg.output.dir);
  write_json(fs::path(cfg.output.dir) / "admissibility.json", j);
  if (!g.quiet) std::cout << j.dump(2) << "\n";
  return rep.admissible() ? 0 : 1;
}

int cmd_sweep(const std::string& arg, const std::string& grid_path, const Globals& g) {
  json base;
  auto cfg = resolve(arg, &base);
  apply_globals(cfg, g);
  std::ifstream in(grid_path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open grid " + grid_path);
  json grid;
  try {
    grid = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("(grid)", e.what());
  }
  const auto rows = sweep(base, grid);
  const std::string hash = io::fnv1a_hex(base.dump() + grid.dump());
  fs::create_directories(cfg.output.dir);
  const fs::path path = fs::path(cfg.output.dir) / "sweep.csv";
  std::ofstream out(path, std::ios::binary);
  out << sweep_csv(rows, hash);
  if (!g.quiet) {
    std::size_t failed = 0;
    for (const auto& r : rows) failed += !r.error.empty();
    fmt::print("{} runs ({} failed) on {} threads -> {}\n", rows.size(), failed, sweep_threads(), path.string());
  }
  return 0;
}

int cmd_rescale(const std::string& traj, const std::vector<int>& ladder, std::optional<double> T,
                const Globals& g) {
  std::ifstream in(traj, std::ios::binary);
  if (!in) throw InvalidInput("cannot open trajectory " + traj);
  std::string first;
  std::getline(in, first);
  json header = json::parse(first, nullptr, false);
  in.clear();
  in.seekg(0);
  const auto snaps = io::read_trajectory(in);
  const auto rep = rescale_lab(snaps, ladder, T);

  const fs::path dir = g.out_dir.empty() ? fs::path(traj).parent_path() / "rescale" : fs::path(g.out_dir);
  fs::create_directories(dir / "frames");
  json out;
  out["config_hash"] = header.is_object() ? header.value("config_hash", "") : "";
  if (header.is_object() && header.contains("seed")) out["seed"] = header["seed"];
  out["snapshots"] = snaps.size();
  const auto& s = rep.singularity;
  out["classification"] = {{"type", to_string(s.type)},
                           {"T_est", std::isfinite(s.T_est) ? json(s.T_est) : json(nullptr)},
                           {"sup_product", s.sup_product},
                           {"inverse_slope", s.inverse_slope},
                           {"decade_growth", s.decade_growth},
                           {"decade_samples", s.decade_samples}};
  out["T"] = rep.T;
  json rungs = json::array();
  for (const auto& h : rep.hamilton) {
    const auto& c = h.frames[h.center_frame];
    double kmax = 0.0;
    for (const auto& f : h.frames) {
      if (f.tau <= 0.0) kmax = std::max(kmax, curvature(f.curve).max_abs());
    }
    rungs.push_back({{"j", h.j},
                     {"p", h.sample.p},
                     {"t", h.sample.t},
                     {"Q", h.sample.Q},
                     {"frames", h.frames.size()},
                     {"max_kappa_tau_le_0", kmax},
                     {"center_kappa", std::abs(curvature(c.curve).values[h.sample.p])}});
    const auto stem = fmt::format("hamilton_j{}", h.j);
    write_json(dir / "frames" / (stem + ".json"), io::frame_to_json(c));
    write_json(dir / "frames" / (stem + ".meta.json"), io::frame_sidecar(c));
  }
  out["hamilton"] = rungs;
  if (rep.parabolic) {
    out["parabolic"] = {{"tau", rep.parabolic->tau},
                        {"Q", rep.parabolic->Q},
                        {"shrinker_residual_l2", *rep.shrinker_l2},
                        {"fitted_radius", fit_circular_arc(rep.parabolic->curve).radius}};
    write_json(dir / "frames" / "parabolic.json", io::frame_to_json(*rep.parabolic));
    write_json(dir / "frames" / "parabolic.meta.json", io::frame_sidecar(*rep.parabolic));
  }
  write_json(dir / "rescale.json", out);
  if (!g.quiet) std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arcflow: area-preserving curve shortening with a free boundary"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out-dir", g.out_dir, "Directory for all outputs (overrides the config)");
  app.add_flag("--frames", g.frames, "Write SVG frames");
  app.add_flag("--quiet", g.quiet, "Print nothing on success");

  std::string config, grid, trajectory;
  std::vector<int> ladder{2, 4, 8, 16, 32, 64};
  std::optional<double> T;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("config", config, "Config file or preset (stationary, main-theorem)")->required();
  auto* sw = app.add_subcommand("sweep", "Run a parameter grid");
  sw->add_option("config", config, "Template config file or preset")->required();
  sw->add_option("grid", grid, "JSON object {\"dotted.path\": [values]}")->required();
  auto* check = app.add_subcommand("check", "Admissibility report only");
  check->add_option("config", config, "Config file or preset")->required();
  auto* rescale = app.add_subcommand("rescale", "Blowup analysis of a trajectory");
  rescale->add_option("trajectory", trajectory, "trajectory.jsonl from a run")->required();
  rescale->add_option("--ladder", ladder, "Hamilton ladder j values");
  rescale->add_option("--T", T, "Singular time (default: extrapolated)");
  for (auto* sub : {run, sw, check, rescale}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*run) return cmd_run(config, g);
    if (*sw) return cmd_sweep(config, grid, g);
    if (*check) return cmd_check(config, g);
    if (*rescale) return cmd_rescale(trajectory, ladder, T, g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
