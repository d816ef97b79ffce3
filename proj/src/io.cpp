#include "arcflow/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>

#include "arcflow/errors.hpp"

namespace arcflow::io {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

json curve_to_json(const DiscreteCurve& curve) {
  json nodes = json::array();
  for (const auto& p : curve.nodes()) nodes.push_back({p.x, p.y});
  return {{"nodes", nodes}, {"closed", curve.closed()}};
}

DiscreteCurve curve_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw InvalidInput("curve document needs a \"nodes\" array");
  }
  std::vector<Vec2> p;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_array() || n.size() != 2 || !n[0].is_number() || !n[1].is_number()) {
      throw InvalidInput("curve nodes must be [x, y] number pairs");
    }
    p.push_back({n[0].get<double>(), n[1].get<double>()});
  }
  bool closed = false;
  if (doc.contains("closed")) {
    if (!doc["closed"].is_boolean()) throw InvalidInput("\"closed\" must be a boolean");
    closed = doc["closed"].get<bool>();
  }
  return DiscreteCurve(std::move(p), closed);
}

json state_to_json(const FlowState& state) {
  json j = curve_to_json(state.curve);
  j["t"] = state.t;
  j["step"] = state.step_index;
  j["attached"] = state.attached;
  j["lift"] = {state.lift.a, state.lift.b};
  return j;
}

FlowState state_from_json(const json& doc) {
  FlowState s;
  s.curve = curve_from_json(doc);
  s.t = doc.value("t", 0.0);
  s.step_index = doc.value("step", std::size_t{0});
  s.attached = doc.value("attached", false);
  if (doc.contains("lift") && doc["lift"].is_array() && doc["lift"].size() == 2) {
    s.lift = {doc["lift"][0].get<double>(), doc["lift"][1].get<double>()};
  }
  return s;
}

json frame_to_json(const RescaledFrame& frame) { return curve_to_json(frame.curve); }

json frame_sidecar(const RescaledFrame& frame) {
  return {{"Q", frame.Q}, {"tau", frame.tau}, {"origin", {frame.origin.x, frame.origin.y}}};
}

std::vector<FlowState> read_trajectory(std::istream& in) {
  std::vector<FlowState> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InvalidInput(fmt::format("trajectory line {}: {}", lineno, e.what()));
    }
    if (j.contains("nodes")) out.push_back(state_from_json(j));
  }
  return out;
}

std::string csv_preamble(const std::string& config_hash, std::uint64_t seed) {
  return fmt::format("# arcflow config_hash={} seed={}\n{}\n", config_hash, seed, kCsvHeader);
}

std::string csv_row(const DiagnosticsRecord& r) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g}\n", r.t,
                     r.length, r.area, r.kappa_bar, r.turning, r.min_kappa, r.max_kappa, r.index,
                     r.residual_l2, r.density);
}

std::string render_svg(const FlowState& state, const SupportCurve& sigma, const std::string& config_hash) {
  const auto& p = state.curve.nodes();
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& v : p) {
    x0 = std::min(x0, v.x);
    y0 = std::min(y0, v.y);
    x1 = std::max(x1, v.x);
    y1 = std::max(y1, v.y);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double pad = 0.25 * span;
  x0 -= pad;
  y0 -= pad;
  const double w = x1 - x0 + pad, hgt = y1 - y0 + pad;
  const double stroke = 0.004 * std::max(w, hgt);

  // y is flipped so the picture has the usual orientation.
  auto pt = [&](const Vec2& v) { return fmt::format("{:.9g},{:.9g}", v.x, -v.y); };
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.9g} {:.9g} {:.9g} {:.9g}\" width=\"600\" "
      "height=\"600\">\n<!-- arcflow config_hash={} t={:.17g} -->\n",
      x0, -(y0 + hgt), w, hgt, config_hash, state.t);

  std::string sig;
  for (const auto& s : sigma.sample()) sig += pt(s.point) + " ";
  out += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-width=\"{:.9g}\"/>\n", sig,
                     stroke);
  std::string cur;
  for (const auto& v : p) cur += pt(v) + " ";
  out += fmt::format("<{} points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.9g}\"/>\n",
                     state.curve.closed() ? "polygon" : "polyline", cur, stroke);
  if (!state.curve.closed()) {
    out += fmt::format(
        "<line x1=\"{:.9g}\" y1=\"{:.9g}\" x2=\"{:.9g}\" y2=\"{:.9g}\" stroke=\"black\" "
        "stroke-dasharray=\"{:.9g}\" stroke-width=\"{:.9g}\"/>\n",
        p.front().x, -p.front().y, p.back().x, -p.back().y, 4.0 * stroke, 0.5 * stroke);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace arcflow::io
