#include "qasumm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace qasumm {

namespace {

// Stream tags keep the random streams of different phases disjoint.
constexpr std::uint64_t kPretrainStream = 0x707265;
constexpr std::uint64_t kReinforceStream = 0x726c;
constexpr std::uint64_t kShuffleStream = 0x736875;

std::vector<std::vector<const Example*>> make_batches(std::span<const Example> docs,
                                                      std::size_t batch, Rng& rng) {
  std::vector<const Example*> order;
  order.reserve(docs.size());
  for (const Example& ex : docs) order.push_back(&ex);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<const Example*>> out;
  for (std::size_t i = 0; i < order.size(); i += batch) {
    out.emplace_back(order.begin() + static_cast<long>(i),
                     order.begin() + static_cast<long>(std::min(order.size(), i + batch)));
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("train config: ") + what);
  };
  require(k >= 1, "k must be at least 1");
  require(lr > 0.0 && pretrain_lr > 0.0, "learning rates must be positive");
  require(batch >= 1, "batch must be at least 1");
  require(epochs_max >= 1, "epochs_max must be at least 1");
  require(n_samples >= 1, "n_samples must be at least 1");
  require(lr_worsen_threshold > 0.0, "lr_worsen_threshold must be positive");
  require(patience >= 1, "patience must be at least 1");
  require(weights.delta > 0.0 && weights.delta < 1.0, "delta must be in (0, 1)");
  require(weights.gamma >= 0.0 && weights.alpha >= 0.0 && weights.beta >= 0.0,
          "reward coefficients must be non-negative");
  require(baseline_decay >= 0.0 && baseline_decay < 1.0, "baseline_decay must be in [0, 1)");
}

SummaryMask pretrain_labels(const Document& doc) {
  std::set<std::pair<std::string, std::string>> bigrams;
  for (const auto& s : doc.abstract_sentences) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) bigrams.emplace(s[i], s[i + 1]);
  }
  const auto& x = doc.source_tokens;
  SummaryMask y(x.size(), 0);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    if (bigrams.count({x[t], x[t + 1]}) != 0) y[t] = 1;
  }
  return y;
}

double binary_cross_entropy(std::span<const double> probs, std::span<const std::uint8_t> labels) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw std::invalid_argument("binary_cross_entropy: size mismatch");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    total += labels[t] != 0 ? std::log(probs[t]) : std::log1p(-probs[t]);
  }
  return -total / static_cast<double>(probs.size());
}

// --- Adam -----------------------------------------------------------------

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(ParamStore& store) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& name : store.names()) {
    Tensor& p = store.value(name);
    const Tensor& g = store.grad(name);
    auto [mit, inserted_m] = m_.try_emplace(name, p.shape(), 0.0);
    auto [vit, inserted_v] = v_.try_emplace(name, p.shape(), 0.0);
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

void Adam::restore(std::uint64_t steps, std::map<std::string, Tensor> m,
                   std::map<std::string, Tensor> v) {
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

// --- LR schedule ------------------------------------------------------------

LrSchedule::LrSchedule(double lr, double threshold) : lr_(lr), threshold_(threshold) {}

bool LrSchedule::observe(double objective) {
  if (!seen_ || objective > best_) {
    seen_ = true;
    best_ = objective;
    return false;
  }
  const double scale = std::max(std::abs(best_), 1e-12);
  if ((best_ - objective) / scale > threshold_) {
    lr_ *= 0.5;
    ++halvings_;
    return true;
  }
  return false;
}

// --- Trainer ------------------------------------------------------------------

Trainer::Trainer(SummarizationModel& model, TrainConfig config)
    : model_(model), config_((config.validate(), config)), adam_(config_.lr),
      pretrain_adam_(config_.pretrain_lr) {}

RewardBreakdown Trainer::score(const Example& ex, std::span<const std::uint8_t> mask,
                               QaTrace* trace) const {
  const auto summary = select<int>(ex.source_ids, mask);
  QaTrace qa = model_.reader().forward(model_.params(), summary, ex.questions);
  const double r_b =
      bigram_recall(mask, ex.doc.source_tokens, ex.doc.abstract_sentences, config_.bigram);
  const double r_f = fluency_penalty(mask);
  const double r_s = length_penalty(mask, config_.weights.delta);
  const RewardBreakdown out = total_reward(qa.reward, r_b, r_f, r_s, config_.weights);
  if (trace != nullptr) *trace = std::move(qa);
  return out;
}

double Trainer::pretrain_loss(const Example& ex) const {
  const EncodedSeq doc = model_.encode_document(ex.source_ids);
  const SummaryMask labels = pretrain_labels(ex.doc);
  const SampledSummary forced = model_.policy().teacher_forced(model_.params(), doc, labels);
  return binary_cross_entropy(forced.per_step_probs, labels);
}

double Trainer::compute_pretrain_gradient(std::span<const Example* const> batch) {
  ParamStore& params = model_.params();
  params.zero_grad();
  double total = 0.0;
  const double per_doc = 1.0 / static_cast<double>(batch.size());
  for (const Example* ex : batch) {
    Rng rng(derive_seed(config_.seed, {kPretrainStream, pretrain_step_, ex->index}));
    const Dropout enc_drop{model_.config().encoder_dropout, &rng};
    const EncodedSeq doc = model_.encode_document(ex->source_ids, enc_drop);
    const SummaryMask labels = pretrain_labels(ex->doc);
    const SampledSummary forced = model_.policy().teacher_forced(params, doc, labels, &rng);
    const double n = static_cast<double>(labels.size());
    total += -forced.log_prob / n;
    std::vector<Vec> d_doc(doc.size(), Vec(doc.dim(), 0.0));
    model_.policy().backward(params, forced, -per_doc / n, d_doc);
    model_.doc_encoder().backward(params, doc, d_doc);
  }
  const double loss = total * per_doc;
  if (!std::isfinite(loss)) {
    throw std::runtime_error("pretraining diverged at step " + std::to_string(pretrain_step_) +
                             " (loss is not finite)");
  }
  ++pretrain_step_;
  return loss;
}

double Trainer::pretrain_step(std::span<const Example* const> batch) {
  const double loss = compute_pretrain_gradient(batch);
  pretrain_adam_.step(model_.params());
  return loss;
}

const ParamStore& Trainer::pretrain(std::span<const Example> train) {
  if (train.empty()) throw std::invalid_argument("pretraining needs at least one document");
  for (std::size_t epoch = 1; epoch <= config_.pretrain_epochs; ++epoch) {
    Rng rng(derive_seed(config_.seed, {kShuffleStream, kPretrainStream, epoch}));
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& batch : make_batches(train, config_.batch, rng)) {
      sum += pretrain_step(batch);
      ++count;
    }
    spdlog::info("pretrain epoch {}: loss {:.4f}", epoch, sum / static_cast<double>(count));
  }
  return model_.params();
}

StepStats Trainer::compute_reinforce_gradient(std::span<const Example* const> batch) {
  ParamStore& params = model_.params();
  params.zero_grad();
  StepStats stats;
  const double n_samples = static_cast<double>(config_.n_samples);
  double reward_sum = 0.0;
  double r_a_sum = 0.0;

  for (const Example* ex : batch) {
    Rng rng(derive_seed(config_.seed, {kReinforceStream, step_, ex->index}));
    const Dropout enc_drop{model_.config().encoder_dropout, &rng};
    const EncodedSeq doc = model_.encode_document(ex->source_ids, enc_drop);
    std::vector<Vec> d_doc(doc.size(), Vec(doc.dim(), 0.0));
    for (std::size_t n = 0; n < config_.n_samples; ++n) {
      const SampledSummary sample = model_.policy().sample(params, doc, rng, true);
      double reward = 0.0;
      QaTrace trace;
      if (reward_override_) {
        reward = reward_override_(*ex, sample.mask);
      } else {
        const RewardBreakdown r = score(*ex, sample.mask, &trace);
        reward = r.total;
        r_a_sum += r.r_a;
      }
      if (!std::isfinite(reward)) {
        spdlog::warn("non-finite reward for document '{}'; sample skipped", ex->doc.id);
        ++stats.skipped;
        continue;
      }
      ++stats.samples;
      reward_sum += reward;
      const double advantage = reward - (config_.baseline && baseline_ready_ ? baseline_ : 0.0);
      model_.policy().backward(params, sample, -advantage / n_samples, d_doc);
      if (config_.train_reader && !reward_override_) {
        model_.reader().backward(params, trace, -1.0 / n_samples);
      }
    }
    model_.doc_encoder().backward(params, doc, d_doc);
  }
  if (stats.samples > 0) {
    stats.mean_reward = reward_sum / static_cast<double>(stats.samples);
    stats.mean_r_a = r_a_sum / static_cast<double>(stats.samples);
  }
  return stats;
}

StepStats Trainer::reinforce_step(std::span<const Example* const> batch) {
  const StepStats stats = compute_reinforce_gradient(batch);
  adam_.step(model_.params());
  if (config_.baseline && stats.samples > 0) {
    baseline_ = baseline_ready_ ? config_.baseline_decay * baseline_ +
                                      (1.0 - config_.baseline_decay) * stats.mean_reward
                                : stats.mean_reward;
    baseline_ready_ = true;
  }
  ++step_;
  return stats;
}

double Trainer::validation_objective(std::span<const Example> docs) const {
  if (docs.empty()) return 0.0;
  double total = 0.0;
  for (const Example& ex : docs) {
    const EncodedSeq doc = model_.encode_document(ex.source_ids);
    const SummaryMask mask = greedy_decode(model_.policy(), model_.params(), doc);
    total += score(ex, mask).total;
  }
  return total / static_cast<double>(docs.size());
}

Checkpoint Trainer::snapshot(std::size_t epoch, const std::vector<double>& history) const {
  Checkpoint ckpt;
  ckpt.params = model_.params();
  ckpt.params.zero_grad();
  ckpt.optimizer_steps = adam_.steps();
  ckpt.adam_m = adam_.first_moment();
  ckpt.adam_v = adam_.second_moment();
  ckpt.lr = adam_.lr();
  ckpt.epoch = epoch;
  ckpt.history = history;
  ckpt.model = model_.config();
  return ckpt;
}

void Trainer::restore(const Checkpoint& ckpt) {
  model_.set_params(ckpt.params);
  adam_.restore(ckpt.optimizer_steps, ckpt.adam_m, ckpt.adam_v);
  if (ckpt.lr > 0.0) adam_.set_lr(ckpt.lr);
}

Checkpoint Trainer::fit(std::span<const Example> train, std::span<const Example> valid) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  const std::span<const Example> held_out = valid.empty() ? train : valid;
  LrSchedule schedule(adam_.lr(), config_.lr_worsen_threshold);
  std::vector<double> history;
  Checkpoint best = snapshot(0, history);
  double best_objective = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config_.epochs_max; ++epoch) {
    Rng rng(derive_seed(config_.seed, {kShuffleStream, kReinforceStream, epoch}));
    double reward = 0.0;
    std::size_t batches = 0;
    bool capped = false;
    for (const auto& batch : make_batches(train, config_.batch, rng)) {
      reward += reinforce_step(batch).mean_reward;
      ++batches;
      if (config_.max_steps > 0 && step_ >= config_.max_steps) {
        capped = true;
        break;
      }
    }
    const double objective = validation_objective(held_out);
    history.push_back(objective);
    if (schedule.observe(objective)) {
      spdlog::info("validation objective worsened by more than {:.0f}%; lr -> {:g}",
                   100.0 * config_.lr_worsen_threshold, schedule.lr());
    }
    adam_.set_lr(schedule.lr());
    spdlog::info("epoch {}: train reward {:.4f}, validation objective {:.4f}", epoch,
                 reward / static_cast<double>(std::max<std::size_t>(batches, 1)), objective);

    if (objective > best_objective) {
      best_objective = objective;
      best = snapshot(epoch, history);
      since_best = 0;
    } else if (++since_best >= config_.patience) {
      spdlog::info("no improvement for {} epochs; stopping", since_best);
      break;
    }
    if (capped) break;
  }
  best.history = history;
  model_.set_params(best.params);
  return best;
}

}  // namespace qasumm
