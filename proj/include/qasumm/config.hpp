#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qasumm/model.hpp"
#include "qasumm/trainer.hpp"

namespace qasumm {

// Invalid or unknown configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path embeddings;

  ModelConfig model;  // vocab_size / answer_count are filled from data
  std::size_t vocab_cap = 150000;
  std::size_t max_input_len = kDefaultMaxInputLen;

  TrainConfig training;

  std::filesystem::path checkpoint;
  std::filesystem::path report;

  // Fingerprint of the settings a checkpoint depends on (architecture,
  // question generation, input truncation).
  std::string hash() const;
};

// Every section and key is optional except data.train; unknown keys are
// rejected. beta defaults to 2 * alpha.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace qasumm
