#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shepherd/config.hpp"
#include "shepherd/model.hpp"

namespace shepherd {

enum class Label : std::uint8_t { kNormal, kVariant };

const char* to_string(Label label);

/// What the shepherd believes about normal sheep, plus the world constants
/// it shares with the true dynamics.
struct PredictionModel {
  GainVector estimated_gains;
  double speed_cap = 1.0;
  double norm_floor = 1e-9;
};

struct ClassifierState {
  bool has_snapshot = false;
  WorldState snapshot;
  std::vector<Vec2> shepherd_path;  // x_d(snapshot.k) .. x_d(k - 1)
  std::vector<Vec2> predicted_positions;
  std::vector<Label> labels;
  std::vector<double> last_errors;
  std::int64_t last_acquisition_k = -1;

  static ClassifierState initial(std::size_t n_sheep);
};

/// Rolls every sheep forward `horizon` steps assuming all of them are normal
/// with the estimated gains and the shepherd follows `shepherd_path`.
/// Requires shepherd_path.size() >= horizon.
std::vector<Vec2> predict_window(const WorldState& snapshot, const PredictionModel& model,
                                 std::span<const Vec2> shepherd_path, std::size_t horizon);

double median(std::vector<double> values);

/// Threshold used by update_labels for the given errors.
double label_threshold(std::span<const double> errors, const ClassifierConfig& cfg);

std::vector<Label> update_labels(std::span<const double> errors, const ClassifierConfig& cfg,
                                 std::span<const Label> prior);

/// Call once per simulation step, before the step is applied. Returns true
/// when this call was an acquisition (errors and labels refreshed).
bool classifier_tick(const WorldState& world, ClassifierState& state, const ClassifierConfig& cfg,
                     const PredictionModel& model);

}  // namespace shepherd
