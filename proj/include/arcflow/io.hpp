#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "arcflow/curve.hpp"
#include "arcflow/diagnostics.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/rescaling.hpp"

namespace arcflow::io {

using json = nlohmann::json;

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// {"nodes": [[x, y], ...], "closed": bool}
json curve_to_json(const DiscreteCurve& curve);
/// Throws InvalidInput on malformed documents.
DiscreteCurve curve_from_json(const json& doc);

json state_to_json(const FlowState& state);
FlowState state_from_json(const json& doc);

/// Curve document plus the frame's Q, tau and origin.
json frame_to_json(const RescaledFrame& frame);
json frame_sidecar(const RescaledFrame& frame);

/// Trajectory lines carrying nodes; other lines (the header) are skipped.
std::vector<FlowState> read_trajectory(std::istream& in);

inline constexpr const char* kCsvHeader =
    "t,length,area,kappa_bar,turning,min_kappa,max_kappa,index,residual_l2,density";

std::string csv_preamble(const std::string& config_hash, std::uint64_t seed);
std::string csv_row(const DiagnosticsRecord& rec);

/// Curve in black, Σ in gray, chord dashed (open curves).
std::string render_svg(const FlowState& state, const SupportCurve& sigma, const std::string& config_hash);

}  // namespace arcflow::io
