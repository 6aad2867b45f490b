#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qasumm/model.hpp"
#include "qasumm/shaping.hpp"

namespace qasumm {

struct TrainConfig {
  std::size_t k = 1;
  AnswerMode mode = AnswerMode::Entity;
  RewardWeights weights;  // gamma 8, alpha 10, beta = 2 alpha, delta 0.4
  BigramOptions bigram;
  double lr = 1e-4;
  std::size_t batch = 16;
  std::size_t epochs_max = 50;
  std::size_t n_samples = 5;
  std::uint64_t seed = 1;
  double lr_worsen_threshold = 0.10;
  std::size_t patience = 5;
  bool baseline = false;  // moving-average reward baseline
  double baseline_decay = 0.9;
  bool train_reader = true;  // fit the reader on sampled summaries alongside the policy
  std::size_t pretrain_epochs = 0;
  double pretrain_lr = 1e-4;
  std::size_t max_steps = 0;  // cap on REINFORCE updates across all epochs; 0 = none

  void validate() const;
};

// y*_t = 1 iff (x_t, x_{t+1}) is a bigram of some abstract sentence.
SummaryMask pretrain_labels(const Document& doc);

// -mean_t [y_t log p_t + (1 - y_t) log(1 - p_t)]
double binary_cross_entropy(std::span<const double> probs, std::span<const std::uint8_t> labels);

class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // Descends along the gradients accumulated in `store`.
  void step(ParamStore& store);

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  std::uint64_t steps() const { return t_; }
  const std::map<std::string, Tensor>& first_moment() const { return m_; }
  const std::map<std::string, Tensor>& second_moment() const { return v_; }
  void restore(std::uint64_t steps, std::map<std::string, Tensor> m, std::map<std::string, Tensor> v);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::map<std::string, Tensor> m_, v_;
};

// Halves the learning rate whenever the (maximized) objective falls more
// than `threshold` below the best value seen so far, relative to |best|.
class LrSchedule {
 public:
  LrSchedule(double lr, double threshold);

  // Returns true when this observation halved the rate.
  bool observe(double objective);

  double lr() const { return lr_; }
  std::optional<double> best() const {
    return seen_ ? std::optional<double>(best_) : std::nullopt;
  }
  std::size_t halvings() const { return halvings_; }

 private:
  double lr_;
  double threshold_;
  double best_ = 0.0;
  bool seen_ = false;
  std::size_t halvings_ = 0;
};

struct Checkpoint {
  ParamStore params;
  std::uint64_t optimizer_steps = 0;
  std::map<std::string, Tensor> adam_m, adam_v;
  double lr = 0.0;
  std::size_t epoch = 0;
  std::vector<double> history;  // validation objective per epoch

  // Filled in by the caller that owns vocabularies and run configuration.
  ModelConfig model;
  std::vector<std::string> vocab;
  std::vector<std::string> answers;
  std::string config_hash;
};

// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fingerprint(std::string_view text);

std::string serialize_checkpoint(const Checkpoint& ckpt);
// Throws DataError on malformed input or when `expected_hash` is non-empty
// and differs from the stored hash.
Checkpoint parse_checkpoint(std::string_view text, const std::string& expected_hash = {});
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_hash = {});

struct StepStats {
  double mean_reward = 0.0;
  double mean_r_a = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

// Overrides the composite reward (used to plug in synthetic rewards).
using RewardFn = std::function<double(const Example&, std::span<const std::uint8_t>)>;

class Trainer {
 public:
  Trainer(SummarizationModel& model, TrainConfig config);

  const TrainConfig& config() const { return config_; }
  Adam& optimizer() { return adam_; }
  std::uint64_t step_count() const { return step_; }
  double baseline() const { return baseline_; }
  void set_reward_override(RewardFn fn) { reward_override_ = std::move(fn); }

  // Composite reward of `mask` for `ex`; the reader trace is returned through
  // `trace` when given.
  RewardBreakdown score(const Example& ex, std::span<const std::uint8_t> mask,
                        QaTrace* trace = nullptr) const;

  // Bigram-label pretraining of the policy.
  double pretrain_loss(const Example& ex) const;  // no dropout
  // Mean per-token cross-entropy of the batch (with dropout); the gradient is
  // left in the store.
  double compute_pretrain_gradient(std::span<const Example* const> batch);
  // compute_pretrain_gradient followed by one update of the pretraining optimizer.
  double pretrain_step(std::span<const Example* const> batch);
  const ParamStore& pretrain(std::span<const Example> train);

  // Zeroes gradients and accumulates the REINFORCE loss gradient of `batch`:
  // -(1/N) sum_n (R(Y_n) - b) grad log P(Y_n|X) per document, summed over
  // documents, plus -(1/N) sum_n grad R_a(Y_n) for the reader.
  StepStats compute_reinforce_gradient(std::span<const Example* const> batch);
  StepStats reinforce_step(std::span<const Example* const> batch);

  // Mean composite reward of greedy summaries.
  double validation_objective(std::span<const Example> docs) const;

  Checkpoint fit(std::span<const Example> train, std::span<const Example> valid);
  Checkpoint snapshot(std::size_t epoch, const std::vector<double>& history) const;
  void restore(const Checkpoint& ckpt);

 private:
  SummarizationModel& model_;
  TrainConfig config_;
  Adam adam_;
  Adam pretrain_adam_;
  std::uint64_t step_ = 0;
  std::uint64_t pretrain_step_ = 0;
  double baseline_ = 0.0;
  bool baseline_ready_ = false;
  RewardFn reward_override_;
};

}  // namespace qasumm
