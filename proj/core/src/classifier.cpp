#include "shepherd/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shepherd/dynamics.hpp"

namespace shepherd {

const char* to_string(Label label) { return label == Label::kNormal ? "normal" : "variant"; }

ClassifierState ClassifierState::initial(std::size_t n_sheep) {
  ClassifierState s;
  s.labels.assign(n_sheep, Label::kNormal);
  s.last_errors.assign(n_sheep, 0.0);
  return s;
}

std::vector<Vec2> predict_window(const WorldState& snapshot, const PredictionModel& model,
                                 std::span<const Vec2> shepherd_path, std::size_t horizon) {
  if (shepherd_path.size() < horizon) {
    throw std::invalid_argument("shepherd path shorter than prediction horizon");
  }
  WorldState sim = snapshot;
  const std::vector<GainVector> gains(sim.n_sheep(), model.estimated_gains);
  std::vector<Vec2> scratch;
  for (std::size_t s = 0; s < horizon; ++s) {
    sim.shepherd_pos = shepherd_path[s];
    sheep_step_inplace(sim, gains, model.speed_cap, model.norm_floor, scratch);
  }
  return sim.sheep_pos;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double label_threshold(std::span<const double> errors, const ClassifierConfig& cfg) {
  if (cfg.threshold_rule.kind == ThresholdKind::kFixed) return cfg.threshold_rule.value;
  std::vector<double> values(errors.begin(), errors.end());
  const double med = median(values);
  for (double& v : values) v = std::abs(v - med);
  const double mad = median(std::move(values));
  return std::max(cfg.abs_floor, med + cfg.threshold_rule.value * mad);
}

std::vector<Label> update_labels(std::span<const double> errors, const ClassifierConfig& cfg,
                                 std::span<const Label> prior) {
  const double theta = label_threshold(errors, cfg);
  std::vector<Label> labels(errors.size(), Label::kNormal);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > theta) labels[i] = Label::kVariant;
    if (cfg.latch && i < prior.size() && prior[i] == Label::kVariant) labels[i] = Label::kVariant;
  }
  return labels;
}

bool classifier_tick(const WorldState& world, ClassifierState& state, const ClassifierConfig& cfg,
                     const PredictionModel& model) {
  const auto period = static_cast<std::int64_t>(cfg.observation_period);
  if (!state.has_snapshot) {
    state.has_snapshot = true;
    state.snapshot = world;
    state.shepherd_path.assign(1, world.shepherd_pos);
    if (state.labels.size() != world.n_sheep()) {
      state.labels.assign(world.n_sheep(), Label::kNormal);
      state.last_errors.assign(world.n_sheep(), 0.0);
    }
    return false;
  }
  if (world.k - state.snapshot.k < period) {
    state.shepherd_path.push_back(world.shepherd_pos);
    return false;
  }

  const auto horizon = static_cast<std::size_t>(world.k - state.snapshot.k);
  state.predicted_positions = predict_window(state.snapshot, model, state.shepherd_path, horizon);
  state.last_errors.resize(world.n_sheep());
  for (std::size_t i = 0; i < world.n_sheep(); ++i) {
    state.last_errors[i] = distance(state.predicted_positions[i], world.sheep_pos[i]);
  }
  state.labels = update_labels(state.last_errors, cfg, state.labels);
  state.last_acquisition_k = world.k;
  state.snapshot = world;
  state.shepherd_path.assign(1, world.shepherd_pos);
  return true;
}

}  // namespace shepherd
