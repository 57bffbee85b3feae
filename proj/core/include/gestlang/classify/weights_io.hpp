#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gestlang/classify/cnn.hpp"

namespace gestlang::classify {

// Byte layout, all integers little-endian:
//   "GESTCNN\0"                       8 bytes
//   u32 version (1)
//   u32 tensor count
//   per tensor: u32 name length, name bytes, u32 rank, u32 dims[rank],
//               float32 data[product(dims)]
inline constexpr std::uint32_t kWeightFileVersion = 1;

std::vector<std::uint8_t> serialize_weights(const CnnModel& model);

// Loads into a model with `spec`. Throws Error(kIncompatibleWeights) on a bad
// header, truncation, trailing bytes, or any tensor whose name or shape
// disagrees with `spec`.
CnnModel deserialize_weights(const std::vector<std::uint8_t>& bytes, const CnnSpec& spec = {});

void save_weights(const CnnModel& model, const std::filesystem::path& path);
CnnModel load_weights(const std::filesystem::path& path, const CnnSpec& spec = {});

}  // namespace gestlang::classify
