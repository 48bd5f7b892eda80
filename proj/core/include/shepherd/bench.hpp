#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shepherd/config_json.hpp"
#include "shepherd/engine.hpp"

namespace shepherd {

/// `count` sheep (the lowest indices) get `mask`; the rest are normal.
struct Composition {
  std::uint8_t mask = kNormalMask;
  int count = 0;

  friend bool operator==(const Composition&, const Composition&) = default;
};

std::string to_string(const Composition& c);

struct ScenarioSpec {
  WorldConfig base;
  std::vector<int> flock_sizes{10};
  std::vector<Composition> compositions{Composition{}};
  std::vector<PolicyConfig> policies{PolicyConfig{}};
  int trials_per_cell = 100;
  std::uint64_t seed_base = 0;
};

/// Throws ConfigError on an ill-formed spec.
void validate(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const Json& doc);
Json scenario_to_json(const ScenarioSpec& spec);

/// Seed of trial `trial` in the cell (n_sheep, composition). Policies are not
/// part of the key, so every policy sees the same arrangements.
std::uint64_t trial_seed(std::uint64_t seed_base, int n_sheep, const Composition& composition,
                         int trial);

/// The world config for one trial of a cell.
WorldConfig cell_config(const ScenarioSpec& spec, int n_sheep, const Composition& composition,
                        std::size_t policy_index, int trial);

/// Confusion counts with Variant as the positive class, scored on the labels
/// at the final acquisition.
struct ClassifierCounts {
  std::int64_t true_pos = 0;
  std::int64_t false_pos = 0;
  std::int64_t false_neg = 0;
  std::int64_t true_neg = 0;
  std::int64_t detections = 0;         // true variants ever labeled variant
  std::int64_t detection_step_sum = 0;  // sum of first-detection k over those

  ClassifierCounts& operator+=(const ClassifierCounts& o);
};

struct ClassifierMetrics {
  double precision = 1.0;  // 1 when nothing was labeled variant
  double recall = 1.0;     // 1 when no true variant exists
  double f1 = 1.0;
  std::optional<double> mean_detection_step;
};

/// Throws std::invalid_argument when the trial carries no classifier data.
ClassifierCounts classifier_counts(const TrialResult& result, std::span<const SheepKind> kinds);
ClassifierMetrics classifier_metrics(const ClassifierCounts& counts);
ClassifierMetrics classifier_metrics(std::span<const TrialResult> results,
                                     std::span<const SheepKind> kinds);

struct CellSummary {
  int n_sheep = 0;
  Composition composition;
  std::size_t policy_index = 0;
  PolicyType policy = PolicyType::kFat;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_steps;    // among successes
  std::optional<double> median_steps;  // among successes
  std::int64_t policy_failures = 0;
  int trial_errors = 0;
  std::uint64_t arrangement_hash = 0;  // over the initial states of every trial
  std::optional<ClassifierCounts> classifier;
};

/// Called after each finished cell with (cells done, cells total, summary).
using ProgressFn = std::function<void(std::size_t, std::size_t, const CellSummary&)>;

/// Results are ordered by (flock size, composition, policy) as listed in the
/// scenario and do not depend on `jobs`.
std::vector<CellSummary> run_matrix(const ScenarioSpec& spec, int jobs = 1,
                                    const ProgressFn& progress = {});

std::uint64_t hash_state(const WorldState& state);

std::string summaries_csv(std::span<const CellSummary> cells);
Json summaries_json(std::span<const CellSummary> cells);
/// One table per flock size, rows = compositions, columns = policies.
std::string summaries_markdown(const ScenarioSpec& spec, std::span<const CellSummary> cells);

// --- acceptance gates over a finished matrix ---

struct GateResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Thresholds for the gates below.
struct GateThresholds {
  double baseline_rate = 0.70;
  double collect_mean_advantage = 0.10;
  int classify_min_wins = 12;
  double classify_min_rate = 0.60;
  double classify_fallback_recall = 0.80;
  double monotonic_slack = 0.05;
  int monotonic_max_inversions = 1;
};

/// FAT on a homogeneous flock of `n_sheep` reaches the baseline rate.
std::optional<GateResult> gate_baseline(std::span<const CellSummary> cells, int n_sheep,
                                        const GateThresholds& t = {});
/// Collect-then-guide vs FAT over unresponsive-sheep compositions. With
/// `require_advantage` the mean advantage must also reach the threshold.
std::optional<GateResult> gate_collect_vs_fat(std::span<const CellSummary> cells, int n_sheep,
                                              bool require_advantage,
                                              const GateThresholds& t = {});
/// Classify-and-guide vs FAT over variant-mask compositions.
std::optional<GateResult> gate_classify_vs_fat(std::span<const CellSummary> cells, int n_sheep,
                                               const GateThresholds& t = {});
/// FAT success non-increasing in the number of unresponsive sheep.
std::optional<GateResult> gate_fat_monotonic(std::span<const CellSummary> cells, int n_sheep,
                                             const GateThresholds& t = {});

/// Every gate whose cells are present in the matrix.
std::vector<GateResult> evaluate_gates(std::span<const CellSummary> cells,
                                       const GateThresholds& t = {});

}  // namespace shepherd
