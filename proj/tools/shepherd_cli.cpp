// Command-line entry point: run | bench | render | validate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shepherd/bench.hpp"
#include "shepherd/config_json.hpp"
#include "shepherd/engine.hpp"
#include "shepherd/export.hpp"

namespace fs = std::filesystem;
using namespace shepherd;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::vector<std::string> overrides;
  int jobs = 1;
  bool trajectory = false;
  bool gate = false;
  int verbosity = 0;
  std::string trajectory_csv;
  std::int64_t step = 0;
  std::string svg_out;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

int cmd_validate(const Options& o) {
  const WorldConfig cfg = load_config(o.config, o.overrides);
  std::cout << config_to_json(cfg).dump(2) << '\n';
  return 0;
}

int cmd_run(const Options& o) {
  const WorldConfig cfg = load_config(o.config, o.overrides);
  const fs::path out(o.out);
  ensure_dir(out);
  const bool classify = cfg.policy.type == PolicyType::kClassifyAndGuide;
  const TrialResult result = run_trial(cfg, TrialOptions{o.trajectory, classify});

  write_file_atomic(out / "result.json", result_to_json(result).dump(2) + "\n");
  if (o.trajectory) {
    std::ostringstream csv;
    write_trajectory_csv(csv, result.trajectory);
    write_file_atomic(out / "trajectory.csv", csv.str());
  }
  if (classify) {
    std::ostringstream csv;
    write_label_csv(csv, result.label_history);
    write_file_atomic(out / "labels.csv", csv.str());
  }
  std::cout << "success=" << (result.success ? "true" : "false") << " steps=" << result.steps_used
            << '\n';
  if (o.verbosity > 0) {
    std::cerr << "wrote " << (out / "result.json").string() << (o.trajectory ? ", trajectory.csv" : "")
              << (classify ? ", labels.csv" : "") << '\n';
    if (result.policy_failures > 0) std::cerr << "policy failures: " << result.policy_failures << '\n';
  }
  return 0;
}

int cmd_bench(const Options& o) {
  Json doc = read_json_file(o.config);
  if (!o.overrides.empty()) {
    if (!doc.contains("base")) doc["base"] = Json::object();
    Json base = config_to_json(config_from_json(doc["base"]));
    apply_overrides(base, o.overrides);
    doc["base"] = base;
  }
  const ScenarioSpec spec = scenario_from_json(doc);
  const fs::path out(o.out);
  ensure_dir(out);

  auto progress = [&](std::size_t done, std::size_t total, const CellSummary& c) {
    std::cerr << "[" << done << "/" << total << "] N=" << c.n_sheep << " "
              << to_string(c.composition) << " " << to_string(c.policy) << "[" << c.policy_index
              << "] success_rate=" << format_real(c.success_rate) << '\n';
  };
  const auto cells = run_matrix(spec, o.jobs, progress);

  write_file_atomic(out / "summary.csv", summaries_csv(cells));
  write_file_atomic(out / "summary.json", summaries_json(cells).dump(2) + "\n");
  write_file_atomic(out / "summary.md", summaries_markdown(spec, cells));
  std::cout << summaries_markdown(spec, cells);

  if (!o.gate) return 0;
  bool ok = true;
  for (const auto& g : evaluate_gates(cells)) {
    std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << '\n';
    ok = ok && g.passed;
  }
  return ok ? 0 : 3;
}

int cmd_render(const Options& o) {
  std::ifstream in(o.trajectory_csv);
  if (!in) throw std::runtime_error("cannot open trajectory '" + o.trajectory_csv + "'");
  const auto frames = read_trajectory_csv(in);
  if (frames.empty() || frames.front().sheep_pos.empty()) {
    throw std::runtime_error("trajectory '" + o.trajectory_csv + "' contains no agents");
  }
  const auto it = std::find_if(frames.begin(), frames.end(),
                               [&](const Frame& f) { return f.k == o.step; });
  if (it == frames.end()) {
    throw std::runtime_error("step " + std::to_string(o.step) + " not in trajectory (max k = " +
                             std::to_string(frames.back().k) + ")");
  }
  WorldConfig cfg = o.config.empty() ? default_config() : load_config(o.config, o.overrides);
  std::vector<SheepKind> kinds = cfg.kind_assignment;
  if (kinds.size() != it->sheep_pos.size()) kinds.clear();
  const std::string svg = render_svg(*it, cfg.goal_center, cfg.goal_radius, kinds);
  fs::path target = o.svg_out.empty() ? fs::path(o.out) / ("frame_" + std::to_string(o.step) + ".svg")
                                      : fs::path(o.svg_out);
  if (target.has_parent_path()) ensure_dir(target.parent_path());
  write_file_atomic(target, svg);
  if (o.verbosity > 0) std::cerr << "wrote " << target.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic shepherding simulator and Monte-Carlo benchmark"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "Config JSON path");
    if (config_required) opt->required();
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--set", o.overrides, "Override a config field (dotted.key=value)");
    sub->add_flag(
        "-v,--verbose", [&](std::int64_t count) { o.verbosity = static_cast<int>(count); },
        "More diagnostics on stderr");
  };

  auto* run = app.add_subcommand("run", "Run one trial");
  add_common(run, true);
  run->add_flag("--trajectory", o.trajectory, "Write trajectory.csv");

  auto* bench = app.add_subcommand("bench", "Run a scenario matrix");
  add_common(bench, true);
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--gate", o.gate, "Exit nonzero if an acceptance gate fails");

  auto* render = app.add_subcommand("render", "Render one trajectory step to SVG");
  add_common(render, false);
  render->add_option("--trajectory", o.trajectory_csv, "Trajectory CSV")->required();
  render->add_option("--step,-k", o.step, "Time index to draw")->required();
  render->add_option("--svg", o.svg_out, "SVG output file (default <out>/frame_<k>.svg)");

  auto* validate_cmd = app.add_subcommand("validate", "Print the resolved configuration");
  add_common(validate_cmd, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (bench->parsed()) return cmd_bench(o);
    if (render->parsed()) return cmd_render(o);
    if (validate_cmd->parsed()) return cmd_validate(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
