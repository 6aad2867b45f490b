#pragma once

#include <span>
#include <string>
#include <vector>

#include "qasumm/summary_mask.hpp"

namespace qasumm {

// |mean(y) - delta|. Mean of an empty mask is taken as 0.
double length_penalty(std::span<const std::uint8_t> y, double delta);

// Number of 0<->1 switches between neighbouring positions.
double fluency_penalty(std::span<const std::uint8_t> y);

struct BigramOptions {
  // Count pairs of selected words separated by unselected ones as adjacent.
  bool cross_gaps = false;
  // Treat reference bigrams as a multiset (clipped counts) instead of a set.
  bool multiset = false;
};

// Fraction of reference bigrams (pairs inside one abstract sentence) that
// appear among the summary's bigrams. Returns 0 when the reference has none.
double bigram_recall(std::span<const std::uint8_t> y, std::span<const std::string> source,
                     std::span<const std::vector<std::string>> abstract_sentences,
                     const BigramOptions& options = {});

struct RewardWeights {
  double gamma = 8.0;   // bigram recall
  double alpha = 10.0;  // fluency
  double beta = 20.0;   // length
  double delta = 0.4;   // target selection ratio
};

struct RewardBreakdown {
  double r_a = 0.0;
  double r_b = 0.0;
  double r_f = 0.0;
  double r_s = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double total = 0.0;
};

// total = r_a + gamma r_b - alpha r_f - beta r_s
RewardBreakdown total_reward(double r_a, double r_b, double r_f, double r_s,
                             const RewardWeights& weights);

}  // namespace qasumm
