#include "shepherd/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace shepherd {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_real(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": bad number '" + s +
                             "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& s, std::size_t line_no) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": bad integer '" +
                             s + "'");
  }
  return v;
}

const char* kind_color(const SheepKind& kind) {
  if (kind.is_normal()) return "#4a7bd0";
  if (kind.is_unresponsive()) return "#d08a2a";
  return "#c23b3b";
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, std::span<const Frame> trajectory) {
  out << "k,agent_id,role,x,y,label\n";
  for (const Frame& f : trajectory) {
    for (std::size_t i = 0; i < f.sheep_pos.size(); ++i) {
      out << f.k << ',' << i << ",sheep," << format_real(f.sheep_pos[i].x) << ','
          << format_real(f.sheep_pos[i].y) << ',';
      if (i < f.labels.size()) out << to_string(f.labels[i]);
      out << '\n';
    }
    out << f.k << ",0,shepherd," << format_real(f.shepherd_pos.x) << ','
        << format_real(f.shepherd_pos.y) << ",\n";
  }
}

std::vector<Frame> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k,agent_id,role,x,y,label") {
    throw std::runtime_error("trajectory CSV must start with header k,agent_id,role,x,y,label");
  }
  std::vector<Frame> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw std::runtime_error("trajectory line " + std::to_string(line_no) +
                               ": expected 6 columns");
    }
    const std::int64_t k = parse_int(cells[0], line_no);
    const Vec2 p{parse_real(cells[3], line_no), parse_real(cells[4], line_no)};
    if (frames.empty() || frames.back().k != k) {
      if (!frames.empty() && k < frames.back().k) {
        throw std::runtime_error("trajectory line " + std::to_string(line_no) +
                                 ": steps must be non-decreasing");
      }
      frames.push_back(Frame{k, {}, {}, {}});
    }
    Frame& f = frames.back();
    if (cells[2] == "sheep") {
      f.sheep_pos.push_back(p);
      if (cells[5] == "variant") {
        f.labels.resize(f.sheep_pos.size() - 1, Label::kNormal);
        f.labels.push_back(Label::kVariant);
      } else if (cells[5] == "normal") {
        f.labels.resize(f.sheep_pos.size() - 1, Label::kNormal);
        f.labels.push_back(Label::kNormal);
      }
    } else if (cells[2] == "shepherd") {
      f.shepherd_pos = p;
    } else {
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": unknown role '" +
                               cells[2] + "'");
    }
  }
  return frames;
}

void write_label_csv(std::ostream& out, std::span<const LabelRecord> history) {
  out << "k,sheep_id,error,label\n";
  for (const auto& r : history) {
    out << r.k << ',' << r.sheep_id << ',' << format_real(r.error) << ',' << to_string(r.label)
        << '\n';
  }
}

Json result_to_json(const TrialResult& result) {
  auto points = [](const std::vector<Vec2>& v) {
    Json arr = Json::array();
    for (const auto& p : v) arr.push_back({p.x, p.y});
    return arr;
  };
  auto labels = [](const std::vector<Label>& v) {
    Json arr = Json::array();
    for (Label l : v) arr.push_back(to_string(l));
    return arr;
  };
  Json doc;
  doc["success"] = result.success;
  doc["steps_used"] = result.steps_used;
  doc["policy_failures"] = result.policy_failures;
  doc["final_state"] = {{"k", result.final_state.k},
                        {"sheep_pos", points(result.final_state.sheep_pos)},
                        {"sheep_prev_move", points(result.final_state.sheep_prev_move)},
                        {"shepherd_pos",
                         {result.final_state.shepherd_pos.x, result.final_state.shepherd_pos.y}}};
  doc["final_labels"] = labels(result.final_labels);
  Json history = Json::array();
  for (const auto& r : result.label_history) {
    history.push_back(
        {{"k", r.k}, {"sheep_id", r.sheep_id}, {"error", r.error}, {"label", to_string(r.label)}});
  }
  doc["label_history"] = history;
  Json frames = Json::array();
  for (const auto& f : result.trajectory) {
    frames.push_back({{"k", f.k},
                      {"sheep_pos", points(f.sheep_pos)},
                      {"shepherd_pos", {f.shepherd_pos.x, f.shepherd_pos.y}},
                      {"labels", labels(f.labels)}});
  }
  doc["trajectory"] = frames;
  return doc;
}

std::string render_svg(const Frame& frame, const Vec2& goal_center, double goal_radius,
                       std::span<const SheepKind> kinds, const SvgStyle& style) {
  if (frame.sheep_pos.empty()) throw std::invalid_argument("frame contains no sheep");
  Vec2 lo{goal_center.x - goal_radius, goal_center.y - goal_radius};
  Vec2 hi{goal_center.x + goal_radius, goal_center.y + goal_radius};
  auto grow = [&](const Vec2& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  };
  for (const auto& p : frame.sheep_pos) grow(p);
  grow(frame.shepherd_pos);
  lo -= Vec2{style.margin, style.margin};
  hi += Vec2{style.margin, style.margin};
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  const double scale = style.width_px / span;
  // y axis points up in world coordinates
  auto sx = [&](double x) { return format_real(std::round((x - lo.x) * scale * 100) / 100); };
  auto sy = [&](double y) { return format_real(std::round((hi.y - y) * scale * 100) / 100); };
  const double w = std::round((hi.x - lo.x) * scale);
  const double h = std::round((hi.y - lo.y) * scale);
  const std::string dot_r = format_real(std::round(std::max(2.0, 0.5 * scale) * 100) / 100);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg << "<circle cx=\"" << sx(goal_center.x) << "\" cy=\"" << sy(goal_center.y) << "\" r=\""
      << format_real(std::round(goal_radius * scale * 100) / 100)
      << "\" fill=\"#e5f4e3\" stroke=\"#3c8c3c\" stroke-width=\"2\"/>\n";
  for (std::size_t i = 0; i < frame.sheep_pos.size(); ++i) {
    const SheepKind kind = i < kinds.size() ? kinds[i] : SheepKind::normal();
    const bool flagged = i < frame.labels.size() && frame.labels[i] == Label::kVariant;
    svg << "<circle cx=\"" << sx(frame.sheep_pos[i].x) << "\" cy=\"" << sy(frame.sheep_pos[i].y)
        << "\" r=\"" << dot_r << "\" fill=\"" << kind_color(kind) << '"';
    if (flagged) svg << " stroke=\"#000000\" stroke-width=\"2\"";
    svg << "/>\n";
  }
  svg << "<rect x=\"" << sx(frame.shepherd_pos.x - 0.6) << "\" y=\""
      << sy(frame.shepherd_pos.y + 0.6) << "\" width=\""
      << format_real(std::round(1.2 * scale * 100) / 100) << "\" height=\""
      << format_real(std::round(1.2 * scale * 100) / 100) << "\" fill=\"#222222\"/>\n";
  svg << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">k=" << frame.k
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace shepherd
