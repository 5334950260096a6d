// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "importantaug/models.hpp"

namespace importantaug {

// On-disk parameter container. Layout:
//   bytes 0-7    magic "IAUGCKP1"
//   bytes 8-11   format version (u32, little-endian)
//   bytes 12-19  header length in bytes (u64, little-endian)
//   header       UTF-8 JSON: kind, word list, embedded run config, and a
//                tensor directory (name, rows, cols, offset)
//   payload      row-major float64 tensors, little-endian, at the listed
//                offsets
// Doubles round-trip bit-exactly.
struct Checkpoint {
  std::string kind;                // "recognizer" or "generator"
  TensorMap tensors;
  std::vector<std::string> words;  // label order; may be empty for generators
  std::string config_json;         // RunConfig that produced the parameters
};

inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws DataError on a missing file, foreign magic or version mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace importantaug
