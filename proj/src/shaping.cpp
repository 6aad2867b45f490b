#include "qasumm/shaping.hpp"

#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <spdlog/spdlog.h>

namespace qasumm {

std::size_t selected_count(std::span<const std::uint8_t> mask) {
  std::size_t n = 0;
  for (auto y : mask) n += y != 0 ? 1 : 0;
  return n;
}

std::vector<Span> selected_segments(std::span<const std::uint8_t> mask) {
  std::vector<Span> out;
  std::size_t t = 0;
  while (t < mask.size()) {
    if (mask[t] == 0) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    while (t < mask.size() && mask[t] != 0) ++t;
    out.push_back({start, t});
  }
  return out;
}

double length_penalty(std::span<const std::uint8_t> y, double delta) {
  if (y.empty()) return std::abs(delta);
  const double ratio = static_cast<double>(selected_count(y)) / static_cast<double>(y.size());
  return std::abs(ratio - delta);
}

double fluency_penalty(std::span<const std::uint8_t> y) {
  double switches = 0.0;
  for (std::size_t t = 1; t < y.size(); ++t) {
    if ((y[t] != 0) != (y[t - 1] != 0)) switches += 1.0;
  }
  return switches;
}

double bigram_recall(std::span<const std::uint8_t> y, std::span<const std::string> source,
                     std::span<const std::vector<std::string>> abstract_sentences,
                     const BigramOptions& options) {
  using Bigram = std::pair<std::string, std::string>;
  std::map<Bigram, std::size_t> reference;
  for (const auto& sentence : abstract_sentences) {
    for (std::size_t i = 0; i + 1 < sentence.size(); ++i) ++reference[{sentence[i], sentence[i + 1]}];
  }
  if (reference.empty()) {
    spdlog::warn("reference abstract has no bigrams; bigram recall is 0");
    return 0.0;
  }

  std::map<Bigram, std::size_t> candidate;
  if (options.cross_gaps) {
    const auto words = select<std::string>(source, y);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) ++candidate[{words[i], words[i + 1]}];
  } else {
    for (std::size_t t = 0; t + 1 < source.size() && t + 1 < y.size(); ++t) {
      if (y[t] != 0 && y[t + 1] != 0) ++candidate[{source[t], source[t + 1]}];
    }
  }

  std::size_t covered = 0;
  std::size_t total = 0;
  for (const auto& [bigram, count] : reference) {
    auto it = candidate.find(bigram);
    const std::size_t have = it == candidate.end() ? 0 : it->second;
    if (options.multiset) {
      covered += std::min(have, count);
      total += count;
    } else {
      covered += have > 0 ? 1 : 0;
      total += 1;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(total);
}

RewardBreakdown total_reward(double r_a, double r_b, double r_f, double r_s,
                             const RewardWeights& weights) {
  RewardBreakdown out;
  out.r_a = r_a;
  out.r_b = r_b;
  out.r_f = r_f;
  out.r_s = r_s;
  out.gamma = weights.gamma;
  out.alpha = weights.alpha;
  out.beta = weights.beta;
  out.delta = weights.delta;
  out.total = r_a + weights.gamma * r_b - weights.alpha * r_f - weights.beta * r_s;
  return out;
}

}  // namespace qasumm
