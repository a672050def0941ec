// SPDX-License-Identifier: Apache-2.0
#include "attndse/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <utility>

#include "attndse/error.hpp"
#include "attndse/kernels.hpp"
#include "attndse/optimizer.hpp"
#include "attndse/rng.hpp"

namespace adse {
namespace {

constexpr std::size_t kPredictChunk = 256;
constexpr double kDivergenceFactor = 1e3;

// Token row, then table row + position row for every parameter in
// serialization order, for each point of the batch.
Var embed_op(Tape& tape, Var token, Var pos, const std::vector<Var>& tables,
             std::span<const DesignPoint> batch, const std::vector<std::size_t>& order) {
  const std::size_t k = tape.value(token).cols();
  const std::size_t n = order.size() + 1;
  Tensor out({batch.size() * n, k});
  const auto& kt = kernels::active();
  std::vector<std::uint32_t> idx(batch.size() * order.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    double* row = out.data().data() + b * n * k;
    std::copy_n(tape.value(token).data().data(), k, row);
    for (std::size_t s = 0; s < order.size(); ++s) {
      const std::size_t param = order[s];
      const Tensor& table = tape.value(tables[param]);
      const std::uint32_t v = batch[b].indices[param];
      if (v >= table.rows())
        throw InputError("embed: index " + std::to_string(v) + " outside the table of parameter " +
                         std::to_string(param));
      idx[b * order.size() + s] = v;
      double* dst = row + (s + 1) * k;
      std::copy_n(table.data().data() + v * k, k, dst);
      kt.axpy(k, 1.0, tape.value(pos).data().data() + s * k, dst);
    }
  }
  std::vector<Var> inputs{token, pos};
  inputs.insert(inputs.end(), tables.begin(), tables.end());
  return tape.record(
      std::move(out), std::move(inputs),
      [token, pos, tables, order, idx = std::move(idx), k, n](Tape& t, std::uint32_t self) {
        const auto& kt = kernels::active();
        const double* g = t.grad(Var{self}).data();
        const std::size_t L = order.size();
        const std::size_t batch = idx.size() / std::max<std::size_t>(L, 1);
        for (std::size_t b = 0; b < batch; ++b) {
          const double* gb = g + b * n * k;
          kt.axpy(k, 1.0, gb, t.grad(token).data());
          for (std::size_t s = 0; s < L; ++s) {
            const double* gs = gb + (s + 1) * k;
            kt.axpy(k, 1.0, gs, t.grad(pos).data() + s * k);
            kt.axpy(k, 1.0, gs, t.grad(tables[order[s]]).data() + idx[b * L + s] * k);
          }
        }
      },
      "embed");
}

void fill_normal(Tensor& t, Rng& rng, double stddev) {
  for (double& v : t.data()) v = stddev * standard_normal(rng);
}

}  // namespace

std::string_view lr_schedule_name(LrSchedule s) { return s == LrSchedule::kCosine ? "cosine" : "constant"; }

LrSchedule parse_lr_schedule(std::string_view name) {
  if (name == "constant") return LrSchedule::kConstant;
  if (name == "cosine") return LrSchedule::kCosine;
  throw InputError("unknown lr_schedule '" + std::string(name) + "' (expected constant or cosine)");
}

void SurrogateConfig::validate() const {
  if (embed_dim == 0 || depth == 0 || heads == 0 || mlp_hidden == 0 || epochs == 0 || batch_size == 0)
    throw InputError("surrogate: embed_dim, depth, heads, mlp_hidden, epochs and batch_size must be positive");
  if (embed_dim % heads != 0)
    throw InputError("surrogate: embed_dim " + std::to_string(embed_dim) + " not divisible by heads " +
                     std::to_string(heads));
  if (window_size != 0 && (window_size < 3 || window_size % 2 == 0))
    throw InputError("surrogate: window_size must be odd and at least 3");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InputError("surrogate: lr must be positive");
  if (!(layer_norm_eps > 0.0)) throw InputError("surrogate: layer_norm_eps must be positive");
  if (heatmap_head < -1 || (heatmap_head >= 0 && static_cast<std::size_t>(heatmap_head) >= heads))
    throw InputError("surrogate: heatmap_head must be -1 or a head index");
}

nlohmann::json SurrogateConfig::to_json() const {
  return {{"embed_dim", embed_dim},   {"depth", depth},         {"heads", heads},
          {"mlp_hidden", mlp_hidden}, {"window_size", window_size}, {"lr", lr},
          {"epochs", epochs},         {"batch_size", batch_size}, {"seed", seed},
          {"activation", std::string(activation_name(activation))},
          {"layer_norm_eps", layer_norm_eps}, {"heatmap_head", heatmap_head},
          {"lr_schedule", std::string(lr_schedule_name(lr_schedule))}};
}

SurrogateConfig SurrogateConfig::from_json(const nlohmann::json& j) {
  SurrogateConfig c;
  if (!j.is_object()) throw InputError("surrogate config must be an object");
  try {
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.depth = j.value("depth", c.depth);
    c.heads = j.value("heads", c.heads);
    c.mlp_hidden = j.value("mlp_hidden", c.mlp_hidden);
    c.window_size = j.value("window_size", c.window_size);
    c.lr = j.value("lr", c.lr);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
    c.heatmap_head = j.value("heatmap_head", c.heatmap_head);
    if (j.contains("lr_schedule")) c.lr_schedule = parse_lr_schedule(j["lr_schedule"].get<std::string>());
    if (j.contains("activation")) c.activation = parse_activation(j["activation"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("surrogate config: ") + e.what());
  }
  c.validate();
  return c;
}

SurrogateModel::SurrogateModel(const DesignSpace& space, SerializationOrder order, SurrogateConfig cfg,
                               Objective objective)
    : cfg_(cfg), order_(std::move(order)), objective_(objective) {
  cfg_.validate();
  for (const auto& p : space.params()) {
    names_.push_back(p.name);
    cardinalities_.push_back(p.cardinality());
  }
  std::vector<std::size_t> sorted = order_.order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != i || sorted.size() != space.size())
      throw InputError("surrogate: serialization order is not a permutation of the space parameters");
  window_ = cfg_.window_size != 0 ? cfg_.window_size : order_.window_size;
  if (window_ < 3 || window_ % 2 == 0) throw InputError("surrogate: window size must be odd and at least 3");
  allocate();
  initialize(cfg_.seed);
}

std::size_t SurrogateModel::add_param(std::string name, std::size_t rows, std::size_t cols) {
  params_.push_back({std::move(name), Tensor({rows, cols})});
  return params_.size() - 1;
}

void SurrogateModel::allocate() {
  const std::size_t k = cfg_.embed_dim, h = cfg_.mlp_hidden, L = names_.size();
  params_.clear();
  embed_.clear();
  blocks_.clear();
  token_ = add_param("token", 1, k);
  pos_ = add_param("pos", L, k);
  for (std::size_t i = 0; i < L; ++i) embed_.push_back(add_param("embed." + names_[i], cardinalities_[i], k));
  for (std::size_t d = 0; d <= cfg_.depth; ++d) {
    const bool final = d == cfg_.depth;
    const std::string p = final ? "final." : "block" + std::to_string(d) + ".";
    Block b{};
    b.wq = add_param(p + "wq", k, k);
    b.wk = add_param(p + "wk", k, k);
    b.wv = add_param(p + "wv", k, k);
    b.wo = add_param(p + "wo", k, k);
    b.bo = add_param(p + "bo", 1, k);
    if (!final) {
      b.w1 = add_param(p + "w1", k, h);
      b.b1 = add_param(p + "b1", 1, h);
      b.w2 = add_param(p + "w2", h, k);
      b.b2 = add_param(p + "b2", 1, k);
    }
    blocks_.push_back(b);
  }
  head_w_ = add_param("head.w", k, 1);
  head_b_ = add_param("head.b", 1, 1);
}

void SurrogateModel::initialize(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5eed));
  const double k = static_cast<double>(cfg_.embed_dim);
  const double h = static_cast<double>(cfg_.mlp_hidden);
  fill_normal(params_[token_].value, rng, 1.0);
  fill_normal(params_[pos_].value, rng, 0.5);
  for (std::size_t e : embed_) fill_normal(params_[e].value, rng, 1.0);
  for (const Block& b : blocks_) {
    for (std::size_t w : {b.wq, b.wk, b.wv, b.wo}) fill_normal(params_[w].value, rng, 1.0 / std::sqrt(k));
    if (b.w1) {
      fill_normal(params_[b.w1].value, rng, 1.0 / std::sqrt(k));
      fill_normal(params_[b.w2].value, rng, 1.0 / std::sqrt(h));
    }
  }
  fill_normal(params_[head_w_].value, rng, 1.0 / std::sqrt(k));
}

template <typename Bind>
Var SurrogateModel::build_impl(Tape& tape, std::span<const DesignPoint> batch, Bind bind,
                               std::vector<AttentionHeatmap>* heatmaps, AttentionStats* stats) const {
  const std::size_t n = sequence_length();
  const double eps = cfg_.layer_norm_eps;
  for (const auto& p : batch)
    if (p.indices.size() != names_.size())
      throw InputError("surrogate: design point has " + std::to_string(p.indices.size()) +
                       " indices, model expects " + std::to_string(names_.size()));
  std::vector<Var> tables;
  for (std::size_t e : embed_) tables.push_back(bind(e));
  Var x = embed_op(tape, bind(token_), bind(pos_), tables, batch, order_.order);

  for (std::size_t d = 0; d < blocks_.size(); ++d) {
    const Block& b = blocks_[d];
    const bool final = d + 1 == blocks_.size();
    const Var a = tape.layer_norm(x, eps);
    const Var q = tape.matmul(a, bind(b.wq));
    const Var kk = tape.matmul(a, bind(b.wk));
    const Var v = tape.matmul(a, bind(b.wv));
    const Var o = windowed_attention(tape, q, kk, v, n, cfg_.heads, window_, stats,
                                     final ? heatmaps : nullptr, cfg_.heatmap_head);
    x = tape.add(x, tape.add_bias(tape.matmul(o, bind(b.wo)), bind(b.bo)));
    if (final) break;
    const Var m = tape.layer_norm(x, eps);
    const Var hid = tape.activation(tape.add_bias(tape.matmul(m, bind(b.w1)), bind(b.b1)), cfg_.activation);
    x = tape.add(x, tape.add_bias(tape.matmul(hid, bind(b.w2)), bind(b.b2)));
  }
  std::vector<std::size_t> token_rows(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) token_rows[i] = i * n;
  const Var t = tape.layer_norm(tape.gather_rows(x, token_rows), eps);
  return tape.add_bias(tape.matmul(t, bind(head_w_)), bind(head_b_));
}

Var SurrogateModel::build(Tape& tape, std::span<const DesignPoint> batch, bool trainable,
                          std::vector<AttentionHeatmap>* heatmaps, AttentionStats* stats) {
  if (!trainable) return std::as_const(*this).build(tape, batch, heatmaps, stats);
  return build_impl(tape, batch, [&](std::size_t i) { return tape.parameter(params_[i].value); }, heatmaps,
                    stats);
}

Var SurrogateModel::build(Tape& tape, std::span<const DesignPoint> batch, std::vector<AttentionHeatmap>* heatmaps,
                          AttentionStats* stats) const {
  return build_impl(tape, batch, [&](std::size_t i) { return tape.view(params_[i].value); }, heatmaps, stats);
}

std::vector<SurrogateModel::Prediction> SurrogateModel::predict_with_heatmaps(
    std::span<const DesignPoint> points) const {
  std::vector<Prediction> out;
  out.reserve(points.size());
  for (std::size_t s = 0; s < points.size(); s += kPredictChunk) {
    const auto chunk = points.subspan(s, std::min(kPredictChunk, points.size() - s));
    Tape tape;
    std::vector<AttentionHeatmap> maps;
    const Var y = build(tape, chunk, &maps);
    const Tensor& yv = tape.value(y);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double value = mean_ + scale_ * yv[i];
      if (!std::isfinite(value)) throw NumericalError("surrogate: non-finite prediction");
      out.push_back({value, std::move(maps[i])});
    }
  }
  return out;
}

std::vector<double> SurrogateModel::predict(std::span<const DesignPoint> points) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (std::size_t s = 0; s < points.size(); s += kPredictChunk) {
    const auto chunk = points.subspan(s, std::min(kPredictChunk, points.size() - s));
    Tape tape;
    const Var y = build(tape, chunk);
    const Tensor& yv = tape.value(y);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double value = mean_ + scale_ * yv[i];
      if (!std::isfinite(value)) throw NumericalError("surrogate: non-finite prediction");
      out.push_back(value);
    }
  }
  return out;
}

double SurrogateModel::predict(const DesignPoint& p) const { return predict(std::span(&p, 1))[0]; }

SurrogateModel::Prediction SurrogateModel::predict_with_heatmap(const DesignPoint& p) const {
  return std::move(predict_with_heatmaps(std::span(&p, 1))[0]);
}

Tensor SurrogateModel::embed(const DesignPoint& p) const {
  Tape tape;
  std::vector<Var> tables;
  for (std::size_t e : embed_) tables.push_back(tape.view(params_[e].value));
  const Var x = embed_op(tape, tape.view(params_[token_].value), tape.view(params_[pos_].value), tables,
                         std::span(&p, 1), order_.order);
  return tape.value(x);
}

std::vector<TrainingLogRow> SurrogateModel::train(const LabeledSet& data, const LabeledSet* holdout) {
  const std::size_t n = data.points.size();
  if (data.labels.size() != n) throw InputError("train: points and labels differ in length");
  if (n < 2) throw InputError("train: need at least two labeled points");
  for (double y : data.labels)
    if (!std::isfinite(y)) throw InputError("train: non-finite label");

  mean_ = std::accumulate(data.labels.begin(), data.labels.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double y : data.labels) var += (y - mean_) * (y - mean_);
  const double sd = std::sqrt(var / static_cast<double>(n));
  // Constant labels: the spread is zero and every prediction is the mean.
  scale_ = sd > 1e-12 * std::max(1.0, std::abs(mean_)) ? sd : 0.0;
  const double norm = scale_ > 0.0 ? scale_ : 1.0;

  std::vector<Parameter*> ptrs;
  for (auto& p : params_) {
    p.value.enable_grad();
    ptrs.push_back(&p);
  }
  Adam adam(cfg_.lr);
  Rng rng(mix_seed(cfg_.seed, 0x7a11));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<TrainingLogRow> log;
  // Divergence is measured against the untrained loss on the whole set.
  double initial = 0.0;
  {
    Tensor target({n, 1});
    for (std::size_t i = 0; i < n; ++i) target[i] = (data.labels[i] - mean_) / norm;
    Tape tape;
    initial = tape.value(tape.mse(std::as_const(*this).build(tape, data.points), target))[0];
  }
  std::vector<DesignPoint> batch;
  for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    if (cfg_.lr_schedule == LrSchedule::kCosine)
      adam.set_lr(cfg_.lr * 0.5 *
                  (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch - 1) / static_cast<double>(cfg_.epochs))));
    shuffle(perm.begin(), perm.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t s = 0; s < n; s += cfg_.batch_size) {
      const std::size_t m = std::min(cfg_.batch_size, n - s);
      batch.clear();
      Tensor target({m, 1});
      for (std::size_t i = 0; i < m; ++i) {
        batch.push_back(data.points[perm[s + i]]);
        target[i] = (data.labels[perm[s + i]] - mean_) / norm;
      }
      for (auto& p : params_) p.value.zero_grad();
      Tape tape;
      const Var loss = tape.mse(build(tape, batch, true), target);
      const double lv = tape.value(loss)[0];
      if (!std::isfinite(lv)) throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch));
      tape.backward(loss);
      adam.step(ptrs);
      epoch_loss += lv;
      ++batches;
    }
    const double mean_loss = epoch_loss / static_cast<double>(batches);
    if (mean_loss > kDivergenceFactor * initial && mean_loss > 1e-12)
      throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch) + " (" +
                           std::to_string(mean_loss) + " vs initial " + std::to_string(initial) + ")");
    TrainingLogRow row{epoch, mean_loss, std::nullopt};
    if (holdout && !holdout->points.empty()) row.holdout_mape = mape(predict(holdout->points), holdout->labels);
    log.push_back(row);
  }
  return log;
}

const Parameter& SurrogateModel::parameter(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return p;
  throw InputError("surrogate: no parameter named '" + name + "'");
}

Checkpoint SurrogateModel::to_checkpoint() const {
  Checkpoint c;
  nlohmann::json params = nlohmann::json::array();
  for (std::size_t i = 0; i < names_.size(); ++i)
    params.push_back({{"name", names_[i]}, {"cardinality", cardinalities_[i]}});
  c.metadata = {{"format", "attndse-surrogate"},
                {"objective", std::string(objective_name(objective_))},
                {"config", cfg_.to_json()},
                {"order", order_.to_json()},
                {"parameters", params},
                {"target_mean", mean_},
                {"target_scale", scale_}};
  for (const auto& p : params_) c.tensors.push_back({p.name, Tensor(p.value.shape(), std::vector<double>(
                                                                                        p.value.data().begin(), p.value.data().end()))});
  return c;
}

SurrogateModel SurrogateModel::from_checkpoint(const Checkpoint& ckpt, const DesignSpace& space) {
  const auto& meta = ckpt.metadata;
  if (meta.value("format", std::string()) != "attndse-surrogate")
    throw InputError("checkpoint is not a surrogate model");
  SurrogateModel m;
  try {
    const auto& params = meta.at("parameters");
    if (params.size() != space.size())
      throw CompatibilityError("checkpoint has " + std::to_string(params.size()) + " parameters, space has " +
                               std::to_string(space.size()));
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto name = params[i].at("name").get<std::string>();
      const auto card = params[i].at("cardinality").get<std::size_t>();
      if (name != space.param(i).name || card != space.param(i).cardinality())
        throw CompatibilityError("checkpoint parameter " + std::to_string(i) + " is " + name + " (" +
                                 std::to_string(card) + " values), space has " + space.param(i).name + " (" +
                                 std::to_string(space.param(i).cardinality()) + " values)");
    }
    m = SurrogateModel(space, SerializationOrder::from_json(meta.at("order")),
                       SurrogateConfig::from_json(meta.at("config")),
                       parse_objective(meta.at("objective").get<std::string>()));
    m.mean_ = meta.at("target_mean").get<double>();
    m.scale_ = meta.at("target_scale").get<double>();
    if (!std::isfinite(m.mean_) || !std::isfinite(m.scale_) || m.scale_ < 0.0)
      throw InputError("checkpoint metadata: invalid target normalization");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint metadata: ") + e.what());
  }
  for (auto& p : m.params_) {
    const Parameter* src = ckpt.find(p.name);
    if (!src) throw InputError("checkpoint lacks tensor '" + p.name + "'");
    if (!src->value.same_shape(p.value))
      throw CompatibilityError("checkpoint tensor '" + p.name + "' has shape " + src->value.shape_string() +
                               ", expected " + p.value.shape_string());
    std::copy(src->value.data().begin(), src->value.data().end(), p.value.data().begin());
  }
  return m;
}

double mape(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw InputError("mape: length mismatch");
  if (truth.empty()) throw InputError("mape: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) throw InputError("mape: zero truth value at index " + std::to_string(i));
    total += std::abs(pred[i] - truth[i]) / std::abs(truth[i]);
  }
  return 100.0 * total / static_cast<double>(truth.size());
}

}  // namespace adse
