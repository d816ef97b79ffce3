#include "arcflow/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "arcflow/diagnostics.hpp"
#include "arcflow/errors.hpp"
#include "arcflow/io.hpp"

namespace arcflow {

using nlohmann::json;

namespace {

// Typed, path-aware access to one JSON object; rejects unknown keys.
class Fields {
 public:
  Fields(const json& obj, std::string path, std::set<std::string> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where(""), "must be an object");
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!allowed.count(it.key())) throw ConfigError(where(it.key()), "unknown key");
    }
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "(document)" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }
  bool has(const std::string& key) const { return obj_.contains(key); }
  const json& raw(const std::string& key) const { return obj_.at(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(where(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(key), "must be finite");
    return d;
  }
  double positive(const std::string& key, double fallback) const {
    const double d = number(key, fallback);
    if (!(d > 0.0)) throw ConfigError(where(key), "must be positive");
    return d;
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ConfigError(where(key), "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(where(key), "must be a string");
    return v.get<std::string>();
  }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key), "must be a boolean");
    return v.get<bool>();
  }
  Vec2 point(const std::string& key, Vec2 fallback) const {
    if (!has(key)) return fallback;
    return as_point(obj_.at(key), where(key));
  }
  std::vector<Vec2> points(const std::string& key) const {
    const auto& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(where(key), "must be an array of [x, y] pairs");
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_point(v[i], where(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  static Vec2 as_point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(where, "must be an [x, y] pair");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  const json& obj_;
  std::string path_;
};

json point_json(const Vec2& p) { return json::array({p.x, p.y}); }

json points_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(point_json(p));
  return a;
}

SupportSpec parse_support(const json& doc) {
  Fields f(doc, "support", {"kind", "radius", "a", "b", "center", "points"});
  SupportSpec s;
  s.kind = f.text("kind", "circle");
  s.center = f.point("center", {});
  if (s.kind == "circle") {
    s.radius = f.positive("radius", 1.0);
  } else if (s.kind == "ellipse") {
    s.a = f.positive("a", 1.0);
    s.b = f.positive("b", 1.0);
  } else if (s.kind == "table") {
    if (!f.has("points")) throw ConfigError("support.points", "required for a table support");
    s.points = f.points("points");
  } else {
    throw ConfigError("support.kind", "expected circle, ellipse or table");
  }
  return s;
}

InitialCurveSpec parse_initial(const json& doc) {
  Fields f(doc, "initial", {"kind", "rho", "center_angle", "amplitude", "frequency", "n", "nodes", "closed"});
  InitialCurveSpec s;
  s.kind = f.text("kind", "orthogonal-arc");
  if (s.kind == "orthogonal-arc" || s.kind == "perturbed-arc") {
    s.rho = f.positive("rho", 1.0);
    s.center_angle = f.number("center_angle", 0.0);
    s.n = f.count("n", 200);
    if (s.n < 4) throw ConfigError("initial.n", "must be at least 4");
    if (s.kind == "perturbed-arc") {
      s.perturbation.amplitude = f.number("amplitude", 0.05);
      if (s.perturbation.amplitude < 0.0 || s.perturbation.amplitude >= 1.0) {
        throw ConfigError("initial.amplitude", "must lie in [0, 1)");
      }
      const auto freq = f.count("frequency", 3);
      if (freq < 1) throw ConfigError("initial.frequency", "must be at least 1");
      s.perturbation.lobes = static_cast<int>(freq);
    }
  } else if (s.kind == "nodes") {
    if (!f.has("nodes")) throw ConfigError("initial.nodes", "required for an explicit curve");
    s.nodes = f.points("nodes");
    s.closed = f.flag("closed", false);
  } else {
    throw ConfigError("initial.kind", "expected orthogonal-arc, perturbed-arc or nodes");
  }
  return s;
}

FlowConfig parse_flow(const json& doc) {
  Fields f(doc, "flow", {"dt_safety", "resample_every", "n_nodes", "t_end", "stop_tolerance",
                         "max_kappa_abort", "max_steps", "sample_every"});
  FlowConfig c;
  c.dt_safety = f.number("dt_safety", c.dt_safety);
  c.resample_every = f.count("resample_every", c.resample_every);
  c.n_nodes = f.count("n_nodes", c.n_nodes);
  c.t_end = f.number("t_end", c.t_end);
  c.stop_tolerance = f.number("stop_tolerance", c.stop_tolerance);
  c.max_kappa_abort = f.number("max_kappa_abort", c.max_kappa_abort);
  c.max_steps = f.count("max_steps", c.max_steps);
  c.sample_every = f.count("sample_every", c.sample_every);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("flow." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return c;
}

std::vector<ProbeSpec> parse_probes(const json& doc) {
  if (!doc.is_array()) throw ConfigError("probes", "must be an array");
  std::vector<ProbeSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "probes[" + std::to_string(i) + "]";
    Fields f(doc[i], path, {"x0_param", "T_probe"});
    ProbeSpec p;
    if (!f.has("x0_param")) throw ConfigError(path + ".x0_param", "required");
    const auto& x = f.raw("x0_param");
    if (x.is_string()) {
      p.anchor = x.get<std::string>();
      if (p.anchor != "a" && p.anchor != "b") throw ConfigError(path + ".x0_param", "expected a number, \"a\" or \"b\"");
    } else {
      p.x0_param = f.number("x0_param", 0.0);
    }
    if (!f.has("T_probe")) throw ConfigError(path + ".T_probe", "required");
    p.T_probe = f.positive("T_probe", 1.0);
    out.push_back(p);
  }
  return out;
}

OutputSpec parse_output(const json& doc) {
  Fields f(doc, "output", {"dir", "frames", "frame_every", "trajectory"});
  OutputSpec o;
  o.dir = f.text("dir", o.dir);
  if (o.dir.empty()) throw ConfigError("output.dir", "must not be empty");
  o.frames = f.flag("frames", o.frames);
  o.frame_every = f.count("frame_every", o.frame_every);
  if (o.frame_every == 0) throw ConfigError("output.frame_every", "must be positive");
  o.trajectory = f.flag("trajectory", o.trajectory);
  return o;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << content;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  Fields f(doc, "", {"name", "support", "initial", "flow", "mode", "probes", "output", "seed"});
  ExperimentConfig c;
  c.name = f.text("name", c.name);
  c.seed = f.count("seed", 1);
  if (f.has("support")) c.support = parse_support(f.raw("support"));
  if (f.has("initial")) c.initial = parse_initial(f.raw("initial"));
  c.initial.perturbation.seed = c.seed;
  if (f.has("flow")) c.flow = parse_flow(f.raw("flow"));
  if (f.has("mode")) {
    const auto m = f.text("mode", "area_preserving");
    try {
      c.mode = flow_mode_from_string(m);
    } catch (const ConfigError&) {
      throw ConfigError("mode", "expected area_preserving or csf");
    }
  }
  if (f.has("probes")) c.probes = parse_probes(f.raw("probes"));
  if (f.has("output")) c.output = parse_output(f.raw("output"));

  if ((c.initial.kind != "nodes") && c.support.kind != "circle") {
    throw ConfigError("initial.kind", "arc builders need a circle support; use explicit nodes");
  }
  try {
    (void)build_support(c.support);
  } catch (const InvalidSupport& e) {
    throw ConfigError("support", e.what());
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("(document)", fmt::format("parse error at line {} column {}: {}", line, col, e.what()));
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("(document)", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::string> preset_names() { return {"stationary", "main-theorem"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.seed = 1;
  c.initial.n = 200;
  c.initial.center_angle = 0.0;
  if (name == "stationary") {
    c.initial.kind = "orthogonal-arc";
    c.initial.rho = 1.0;
  } else if (name == "main-theorem") {
    c.initial.kind = "perturbed-arc";
    c.initial.rho = 0.02;
    c.initial.perturbation = {0.05, 3, c.seed};
    c.probes = {{"a", 0.0, 2e-3}, {"b", 0.0, 2e-3}};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  c.output.dir = "arcflow-" + name;
  return c;
}

json to_json(const ExperimentConfig& c) {
  json support = {{"kind", c.support.kind}, {"center", point_json(c.support.center)}};
  if (c.support.kind == "circle") support["radius"] = c.support.radius;
  if (c.support.kind == "ellipse") {
    support["a"] = c.support.a;
    support["b"] = c.support.b;
  }
  if (c.support.kind == "table") support["points"] = points_json(c.support.points);

  json initial = {{"kind", c.initial.kind}};
  if (c.initial.kind == "nodes") {
    initial["nodes"] = points_json(c.initial.nodes);
    initial["closed"] = c.initial.closed;
  } else {
    initial["rho"] = c.initial.rho;
    initial["center_angle"] = c.initial.center_angle;
    initial["n"] = c.initial.n;
    if (c.initial.kind == "perturbed-arc") {
      initial["amplitude"] = c.initial.perturbation.amplitude;
      initial["frequency"] = c.initial.perturbation.lobes;
    }
  }
  const auto& fl = c.flow;
  json flow = {{"dt_safety", fl.dt_safety},         {"resample_every", fl.resample_every},
               {"n_nodes", fl.n_nodes},             {"t_end", fl.t_end},
               {"stop_tolerance", fl.stop_tolerance}, {"max_kappa_abort", fl.max_kappa_abort},
               {"max_steps", fl.max_steps},         {"sample_every", fl.sample_every}};
  json probes = json::array();
  for (const auto& p : c.probes) {
    probes.push_back({{"x0_param", p.anchor.empty() ? json(p.x0_param) : json(p.anchor)}, {"T_probe", p.T_probe}});
  }
  json output = {{"dir", c.output.dir},
                 {"frames", c.output.frames},
                 {"frame_every", c.output.frame_every},
                 {"trajectory", c.output.trajectory}};
  return {{"name", c.name},   {"seed", c.seed},     {"support", support}, {"initial", initial},
          {"flow", flow},     {"mode", to_string(c.mode)}, {"probes", probes}, {"output", output}};
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output");
  return io::fnv1a_hex(j.dump());
}

SupportCurve build_support(const SupportSpec& s) {
  if (s.kind == "circle") return SupportCurve::circle(s.radius, s.center);
  if (s.kind == "ellipse") return SupportCurve::ellipse(s.a, s.b, s.center);
  if (s.kind == "table") return SupportCurve::table(s.points);
  throw ConfigError("support.kind", "expected circle, ellipse or table");
}

FlowState build_initial_state(const ExperimentConfig& c, const SupportCurve& sigma) {
  const auto& in = c.initial;
  if (in.kind == "orthogonal-arc") return attach(orthogonal_arc(sigma, in.rho, in.center_angle, in.n), sigma);
  if (in.kind == "perturbed-arc") {
    return attach(perturbed_arc(sigma, in.rho, in.center_angle, in.perturbation, in.n), sigma);
  }
  DiscreteCurve curve(in.nodes, in.closed);
  if (in.closed || c.mode == FlowMode::csf) {
    // Open csf curves are only attached when both ends sit on Σ.
    const double tol = 1e-6 * metrics(sigma).diameter;
    const bool on_sigma = !in.closed && distance_to_support(sigma, curve.front()) <= tol &&
                          distance_to_support(sigma, curve.back()) <= tol;
    if (!on_sigma) {
      FlowState s;
      s.curve = std::move(curve);
      s.attached = false;
      return s;
    }
  }
  return attach(std::move(curve), sigma);
}

std::size_t count_invariant_violations(const RunResult& res, FlowMode mode, bool attached) {
  std::size_t v = 0;
  const auto& recs = res.records;
  if (recs.empty()) return 0;
  const double L0 = recs.front().length, A0 = recs.front().area;
  const bool ap = attached && mode == FlowMode::area_preserving;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const auto& fl = r.flags;
    v += !fl.embedded;
    for (const auto& f : {fl.contained_in_D, fl.chord_region_convex, fl.kappa_bar_in_window, fl.turning_in_window}) {
      v += f.has_value() && !*f;
    }
    if (ap) {
      v += r.index != 1 || std::abs(r.index_raw - 1.0) >= 0.1;
      v += std::abs(r.area - A0) > 1e-3 * std::abs(A0);
    }
    if (i == 0) continue;
    const auto& q = recs[i - 1];
    if (ap) {
      const double steps = static_cast<double>(std::max<std::size_t>(1, r.step - q.step));
      v += r.length > q.length + 1e-9 * L0 * steps;
    }
    for (std::size_t k = 0; k < std::min(r.densities.size(), q.densities.size()); ++k) {
      if (std::isfinite(r.densities[k]) && std::isfinite(q.densities[k])) v += r.densities[k] > q.densities[k] + 1e-4;
    }
  }
  return v;
}

json admissibility_json(const AdmissibilityReport& r) {
  return {{"L0", r.L0},
          {"A0", r.A0},
          {"kappa_max", r.kappa_max},
          {"sigma_d", r.sigma_d},
          {"diameter", r.diameter},
          {"C", r.C},
          {"c_I", r.c_I},
          {"positive_curvature", r.positive_curvature},
          {"embedded", r.embedded},
          {"outside_support", r.outside_support},
          {"below_sigma_d", r.below_sigma_d},
          {"below_half_inverse_kappa_max", r.below_half_inverse_kappa_max},
          {"below_arcsin_bound", r.below_arcsin_bound},
          {"isoperimetric_ok", r.isoperimetric_ok},
          {"admissible", r.admissible()}};
}

ExperimentOutcome run_experiment(const ExperimentConfig& c, const RunFiles& files) {
  ExperimentOutcome out;
  out.config_hash = config_hash(c);
  const SupportCurve sigma = build_support(c.support);
  const FlowState initial = build_initial_state(c, sigma);

  RunOptions opt;
  opt.store_snapshots = files.write && (c.output.trajectory || c.output.frames);
  if (initial.attached) {
    const auto m = metrics(sigma);
    out.admissibility = check_admissibility(initial.curve, sigma, m);
    opt.reference = ReferenceValues{out.admissibility->L0, out.admissibility->A0, m.diameter};
  }
  for (std::size_t i = 0; i < c.probes.size(); ++i) {
    const auto& p = c.probes[i];
    double param = p.x0_param;
    if (!p.anchor.empty()) {
      if (!initial.attached) throw ConfigError("probes[" + std::to_string(i) + "].x0_param", "needs an attached curve");
      param = p.anchor == "a" ? initial.lift.a : initial.lift.b;
    }
    opt.probes.push_back({sigma.point(param), p.T_probe, 1.0});
  }

  const std::filesystem::path dir(c.output.dir);
  if (files.write) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("output.dir", "cannot create " + dir.string() + ": " + ec.message());
  }

  out.run = run(initial, sigma, c.flow, c.mode, opt);
  const auto& fin = out.run.final_state;
  if (!fin.curve.closed()) out.final_fit = fit_circular_arc(fin.curve);
  out.invariant_violations = count_invariant_violations(out.run, c.mode, initial.attached);
  out.exit_code = out.run.termination == Termination::integration_failure ? 3 : 0;

  if (!files.write) return out;

  std::string csv = io::csv_preamble(out.config_hash, c.seed);
  for (const auto& r : out.run.records) csv += io::csv_row(r);
  write_file(dir / "diagnostics.csv", csv);

  if (c.output.trajectory) {
    std::string lines = json{{"config_hash", out.config_hash}, {"seed", c.seed}, {"name", c.name}}.dump() + "\n";
    for (const auto& s : out.run.snapshots) lines += io::state_to_json(s).dump() + "\n";
    write_file(dir / "trajectory.jsonl", lines);
  }

  json adm = out.admissibility ? admissibility_json(*out.admissibility) : json{{"applicable", false}};
  adm["config_hash"] = out.config_hash;
  adm["seed"] = c.seed;
  write_file(dir / "admissibility.json", adm.dump(2) + "\n");

  json fit = nullptr;
  if (out.final_fit) {
    const auto& f = *out.final_fit;
    const double deg = 180.0 / 3.14159265358979323846;
    fit = {{"center", point_json(f.center)},   {"radius", f.radius},
           {"rms", f.rms},                     {"line", f.line},
           {"start_contact_deg", f.start_contact * deg}, {"end_contact_deg", f.end_contact * deg}};
  }
  json summary = {{"config_hash", out.config_hash},
                  {"seed", c.seed},
                  {"name", c.name},
                  {"termination", to_string(out.run.termination)},
                  {"steps", fin.step_index},
                  {"t_final", fin.t},
                  {"final_fit", fit},
                  {"invariant_violation_count", out.invariant_violations}};
  if (!out.run.records.empty()) {
    const auto& last = out.run.records.back();
    summary["final_residual_l2"] = last.residual_l2;
    summary["final_kappa_bar"] = last.kappa_bar;
    summary["area_drift"] = last.area - out.run.records.front().area;
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  if (c.output.frames) {
    std::filesystem::create_directories(dir / "frames");
    for (std::size_t i = 0; i < out.run.snapshots.size(); i += c.output.frame_every) {
      write_file(dir / "frames" / fmt::format("frame_{:05d}.svg", i),
                 io::render_svg(out.run.snapshots[i], sigma, out.config_hash));
    }
  }
  return out;
}

namespace {

std::vector<json> grid_combinations(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw InvalidInput("sweep grid must be a non-empty object");
  std::vector<json> combos{json::object()};
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array() || it.value().empty()) {
      throw InvalidInput("sweep grid entry '" + it.key() + "' must be a non-empty array");
    }
    std::vector<json> next;
    for (const auto& c : combos) {
      for (const auto& v : it.value()) {
        json n = c;
        n[it.key()] = v;
        next.push_back(std::move(n));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

json::json_pointer pointer_of(const std::string& dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) p += "/" + part;
  return json::json_pointer(p);
}

json apply(const json& base, const json& params) {
  json doc = base;
  for (auto it = params.begin(); it != params.end(); ++it) doc[pointer_of(it.key())] = it.value();
  return doc;
}

}  // namespace

std::vector<json> expand_grid(const json& base, const json& grid) {
  std::vector<json> out;
  for (const auto& p : grid_combinations(grid)) out.push_back(apply(base, p));
  return out;
}

std::size_t sweep_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ARCFLOW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

std::vector<SweepRow> sweep(const json& base, const json& grid) {
  const auto combos = grid_combinations(grid);
  std::vector<SweepRow> rows(combos.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < combos.size(); i = next++) {
      SweepRow& row = rows[i];
      row.index = i;
      row.params = combos[i];
      try {
        const auto cfg = parse_config(apply(base, combos[i]));
        row.seed = cfg.seed;
        const auto o = run_experiment(cfg, {false, true});
        row.admissibility = o.admissibility;
        row.termination = to_string(o.run.termination);
        row.steps = o.run.final_state.step_index;
        row.t_final = o.run.final_state.t;
        row.residual = o.run.records.empty() ? 0.0 : o.run.records.back().residual_l2;
        row.violations = o.invariant_violations;
      } catch (const std::exception& e) {
        row.termination = "error";
        row.error = e.what();
      }
    }
  };
  const std::size_t nt = std::min(sweep_threads(), combos.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& hash) {
  std::string out = fmt::format("# arcflow config_hash={} sweep\n", hash);
  std::vector<std::string> keys;
  if (!rows.empty()) {
    for (auto it = rows.front().params.begin(); it != rows.front().params.end(); ++it) keys.push_back(it.key());
  }
  out += "index,seed";
  for (const auto& k : keys) out += "," + k;
  out += ",positive_curvature,embedded,outside_support,below_sigma_d,below_half_inverse_kappa_max,"
         "below_arcsin_bound,isoperimetric_ok,admissible,termination,steps,t_final,residual_l2,"
         "invariant_violations,error\n";
  auto b = [](bool x) { return x ? "1" : "0"; };
  for (const auto& r : rows) {
    out += std::to_string(r.index) + "," + (r.seed ? std::to_string(*r.seed) : "");
    for (const auto& k : keys) out += "," + r.params.at(k).dump();
    if (r.admissibility) {
      const auto& a = *r.admissibility;
      out += fmt::format(",{},{},{},{},{},{},{},{}", b(a.positive_curvature), b(a.embedded), b(a.outside_support),
                         b(a.below_sigma_d), b(a.below_half_inverse_kappa_max), b(a.below_arcsin_bound),
                         b(a.isoperimetric_ok), b(a.admissible()));
    } else {
      out += ",,,,,,,,";
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += fmt::format(",{},{},{:.17g},{:.17g},{},{}\n", r.termination, r.steps, r.t_final, r.residual,
                       r.violations, err);
  }
  return out;
}

RescaleReport rescale_lab(const std::vector<FlowState>& snapshots, const std::vector<int>& ladder,
                          std::optional<double> T) {
  if (snapshots.empty()) throw InvalidInput("rescale needs at least one snapshot");
  std::vector<BlowupHistorySample> history;
  for (const auto& s : snapshots) {
    if (!history.empty() && !(s.t > history.back().t)) continue;
    history.push_back({s.t, curvature(s.curve).max_abs()});
  }
  RescaleReport rep;
  rep.singularity = classify_singularity(history, T);
  const double last_t = history.back().t;
  if (T) {
    rep.T = *T;
  } else if (std::isfinite(rep.singularity.T_est) && rep.singularity.T_est > last_t) {
    rep.T = rep.singularity.T_est;
  } else {
    rep.T = last_t;
  }
  try {
    rep.hamilton = hamilton_rescale(snapshots, rep.T, ladder);
  } catch (const InvalidInput&) {
    // No snapshot precedes T − 1/j on any rung; the report carries no frames.
  }
  if (rep.T > last_t) {
    const auto& s = snapshots.back();
    Vec2 c;
    for (const auto& p : s.curve.nodes()) c += p;
    c = c / static_cast<double>(s.curve.size());
    rep.parabolic = parabolic_rescale(s, c, rep.T, 1.0 / std::sqrt(2.0 * (rep.T - s.t)));
    rep.shrinker_l2 = self_shrinker_residual(*rep.parabolic).l2;
  }
  return rep;
}

}  // namespace arcflow
