#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arcflow/flow.hpp"
#include "arcflow/initial_curves.hpp"
#include "arcflow/rescaling.hpp"
#include "arcflow/runner.hpp"
#include "arcflow/support_curve.hpp"

namespace arcflow {

struct SupportSpec {
  std::string kind = "circle";  // circle | ellipse | table
  double radius = 1.0;
  double a = 1.0;
  double b = 1.0;
  Vec2 center;
  std::vector<Vec2> points;
};

struct InitialCurveSpec {
  std::string kind = "orthogonal-arc";  // orthogonal-arc | perturbed-arc | nodes
  double rho = 1.0;
  double center_angle = 0.0;
  Perturbation perturbation;
  std::size_t n = 200;
  std::vector<Vec2> nodes;
  bool closed = false;
};

/// x0 = Σf(param). param may be the initial lift values "a" or "b".
struct ProbeSpec {
  std::string anchor;  // "a", "b" or empty for an explicit parameter
  double x0_param = 0.0;
  double T_probe = 0.0;
};

struct OutputSpec {
  std::string dir = "arcflow-out";
  bool frames = false;
  std::size_t frame_every = 1;  // in diagnostics records
  bool trajectory = true;
};

struct ExperimentConfig {
  std::string name = "custom";
  SupportSpec support;
  InitialCurveSpec initial;
  FlowConfig flow;
  FlowMode mode = FlowMode::area_preserving;
  std::vector<ProbeSpec> probes;
  OutputSpec output;
  std::uint64_t seed = 0;
};

/// Throws ConfigError naming the offending field (dotted path).
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Parse errors carry the line and column.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "stationary" or "main-theorem"; ConfigError otherwise.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Canonical document with every default filled in.
nlohmann::json to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical document without the output section.
std::string config_hash(const ExperimentConfig& config);

SupportCurve build_support(const SupportSpec& spec);
FlowState build_initial_state(const ExperimentConfig& config, const SupportCurve& sigma);

struct ExperimentOutcome {
  RunResult run;
  std::optional<AdmissibilityReport> admissibility;
  std::optional<ArcFit> final_fit;
  std::size_t invariant_violations = 0;
  std::string config_hash;
  int exit_code = 0;
};

/// Number of records breaking a monitored invariant (window flags, index,
/// length monotonicity, area drift, density monotonicity).
std::size_t count_invariant_violations(const RunResult& result, FlowMode mode, bool attached);

struct RunFiles {
  bool write = true;
  bool quiet = true;
};

/// Runs and writes diagnostics.csv, trajectory.jsonl, admissibility.json,
/// summary.json and optional frames/ into config.output.dir.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunFiles& files = {});

nlohmann::json admissibility_json(const AdmissibilityReport& r);

/// Cartesian product over {"dotted.path": [values...]}. Throws InvalidInput
/// on an empty grid.
std::vector<nlohmann::json> expand_grid(const nlohmann::json& base, const nlohmann::json& grid);

struct SweepRow {
  std::size_t index = 0;
  nlohmann::json params;
  std::optional<std::uint64_t> seed;
  std::optional<AdmissibilityReport> admissibility;
  std::string termination;
  std::size_t steps = 0;
  double t_final = 0.0;
  double residual = 0.0;
  std::size_t violations = 0;
  std::string error;
};

/// Runs every grid point; failures are recorded per row. Parallel over runs,
/// capped by ARCFLOW_THREADS.
std::vector<SweepRow> sweep(const nlohmann::json& base, const nlohmann::json& grid);
std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& hash);
std::size_t sweep_threads();

struct RescaleReport {
  SingularityReport singularity;
  double T = 0.0;
  std::vector<HamiltonSequence> hamilton;
  /// Type I frame of the last snapshot about its centroid at τ = −1/2.
  std::optional<RescaledFrame> parabolic;
  std::optional<double> shrinker_l2;
};

/// Blowup analysis of stored snapshots. T defaults to the extrapolated
/// singular time, or the last snapshot time when none is found.
RescaleReport rescale_lab(const std::vector<FlowState>& snapshots, const std::vector<int>& ladder,
                          std::optional<double> T = std::nullopt);

}  // namespace arcflow
