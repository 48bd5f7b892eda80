#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shepherd/config_json.hpp"
#include "shepherd/engine.hpp"

namespace shepherd {

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// CSV with header `k,agent_id,role,x,y,label`; one row per agent per frame.
void write_trajectory_csv(std::ostream& out, std::span<const Frame> trajectory);

/// Inverse of write_trajectory_csv. Throws std::runtime_error on malformed input.
std::vector<Frame> read_trajectory_csv(std::istream& in);

/// Rows `k,sheep_id,error,label`, one per sheep per acquisition.
void write_label_csv(std::ostream& out, std::span<const LabelRecord> history);

Json result_to_json(const TrialResult& result);

struct SvgStyle {
  double width_px = 640.0;
  double margin = 5.0;  // world units around the bounding box
};

/// Deterministic SVG of one frame: goal circle, sheep colored by true kind
/// (normal when `kinds` is empty), classifier labels outlined, shepherd.
std::string render_svg(const Frame& frame, const Vec2& goal_center, double goal_radius,
                       std::span<const SheepKind> kinds, const SvgStyle& style = {});

/// Writes `content` to a sibling temp file then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace shepherd
