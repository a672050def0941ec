// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attndse/attention.hpp"
#include "attndse/checkpoint.hpp"
#include "attndse/design_space.hpp"
#include "attndse/microarch_graph.hpp"
#include "attndse/oracle.hpp"
#include "attndse/tape.hpp"
#include "attndse/tensor.hpp"

namespace adse {

enum class LrSchedule { kConstant, kCosine };
std::string_view lr_schedule_name(LrSchedule s);
LrSchedule parse_lr_schedule(std::string_view name);  // throws InputError

struct SurrogateConfig {
  std::size_t embed_dim = 32;
  std::size_t depth = 2;
  std::size_t heads = 2;
  std::size_t mlp_hidden = 64;
  // 0 takes the window from the serialization order.
  std::size_t window_size = 0;
  double lr = 1e-3;
  // Per-epoch learning rate: constant, or cosine annealing from lr towards 0.
  LrSchedule lr_schedule = LrSchedule::kConstant;
  std::size_t epochs = 300;
  std::size_t batch_size = 2;
  std::uint64_t seed = 1;
  Activation activation = Activation::kGelu;
  double layer_norm_eps = 1e-5;
  // Exported heatmap: -1 averages the heads, otherwise that head alone.
  int heatmap_head = -1;

  // Throws InputError on an invalid combination.
  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep their defaults.
  static SurrogateConfig from_json(const nlohmann::json& j);
};

struct TrainingLogRow {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean normalized MSE over the epoch's minibatches
  std::optional<double> holdout_mape;
};

struct LabeledSet {
  std::vector<DesignPoint> points;
  std::vector<double> labels;
};

// Single-objective attention predictor. Parameter value indices are
// embedded per parameter, placed in serialization order after a learned
// prediction token, and passed through `depth` pre-norm attention + MLP
// blocks and one final attention block; the token row feeds a linear head.
class SurrogateModel {
 public:
  SurrogateModel() = default;
  // Random initialization from cfg.seed.
  SurrogateModel(const DesignSpace& space, SerializationOrder order, SurrogateConfig cfg,
                 Objective objective);

  struct Prediction {
    double value = 0.0;
    AttentionHeatmap heatmap;  // positions follow the serialization order
  };

  double predict(const DesignPoint& p) const;
  std::vector<double> predict(std::span<const DesignPoint> points) const;
  Prediction predict_with_heatmap(const DesignPoint& p) const;
  std::vector<Prediction> predict_with_heatmaps(std::span<const DesignPoint> points) const;

  // Token row followed by embedding + position embedding of each parameter
  // in serialization order: [(L+1) x k].
  Tensor embed(const DesignPoint& p) const;

  // Records the normalized predictions [batch x 1] on `tape`. With
  // `trainable` the weights enter as parameters and receive gradients.
  Var build(Tape& tape, std::span<const DesignPoint> batch, bool trainable,
            std::vector<AttentionHeatmap>* heatmaps = nullptr, AttentionStats* stats = nullptr);
  Var build(Tape& tape, std::span<const DesignPoint> batch,
            std::vector<AttentionHeatmap>* heatmaps = nullptr, AttentionStats* stats = nullptr) const;

  // Fits the weights to z-scored labels with Adam over shuffled minibatches.
  // Throws InputError on fewer than two or non-finite labels and
  // NumericalError when the loss diverges (above 1000x its initial value).
  std::vector<TrainingLogRow> train(const LabeledSet& data, const LabeledSet* holdout = nullptr);

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Parameter& parameter(const std::string& name) const;

  const SurrogateConfig& config() const { return cfg_; }
  const SerializationOrder& order() const { return order_; }
  Objective objective() const { return objective_; }
  std::size_t sequence_length() const { return cardinalities_.size() + 1; }
  std::size_t window() const { return window_; }
  double target_mean() const { return mean_; }
  double target_scale() const { return scale_; }  // 0 after constant labels
  const std::vector<std::string>& parameter_names() const { return names_; }

  Checkpoint to_checkpoint() const;
  // Throws CompatibilityError when the checkpoint's parameters do not match
  // the space (names or cardinalities) and InputError on malformed content.
  static SurrogateModel from_checkpoint(const Checkpoint& ckpt, const DesignSpace& space);

 private:
  struct Block {
    std::size_t wq, wk, wv, wo, bo;
    std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;  // absent in the final block
  };

  void allocate();
  void initialize(std::uint64_t seed);
  template <typename Bind>
  Var build_impl(Tape& tape, std::span<const DesignPoint> batch, Bind bind,
                 std::vector<AttentionHeatmap>* heatmaps, AttentionStats* stats) const;
  std::size_t add_param(std::string name, std::size_t rows, std::size_t cols);

  SurrogateConfig cfg_;
  SerializationOrder order_;
  Objective objective_ = Objective::kIpc;
  std::vector<std::string> names_;          // space order
  std::vector<std::size_t> cardinalities_;  // space order
  std::size_t window_ = 3;
  double mean_ = 0.0;
  double scale_ = 1.0;

  std::vector<Parameter> params_;
  std::vector<std::size_t> embed_;  // per space parameter
  std::size_t pos_ = 0, token_ = 0, head_w_ = 0, head_b_ = 0;
  std::vector<Block> blocks_;  // depth blocks then the final attention block
};

// Mean absolute percentage error in percent. Throws InputError on a length
// mismatch, empty input or a zero truth value.
double mape(std::span<const double> pred, std::span<const double> truth);

}  // namespace adse
