#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qasumm/corpus.hpp"

namespace qasumm {

// y_t = 1 when the t-th source word is part of the summary.
using SummaryMask = std::vector<std::uint8_t>;

std::size_t selected_count(std::span<const std::uint8_t> mask);
// Maximal runs of selected positions, as half-open spans.
std::vector<Span> selected_segments(std::span<const std::uint8_t> mask);

template <typename T>
std::vector<T> select(std::span<const T> items, std::span<const std::uint8_t> mask) {
  std::vector<T> out;
  for (std::size_t t = 0; t < items.size() && t < mask.size(); ++t) {
    if (mask[t] != 0) out.push_back(items[t]);
  }
  return out;
}

}  // namespace qasumm
