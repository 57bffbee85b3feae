#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gestlang/vision/raster.hpp"

namespace gestlang::vision {

FrameRaster read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const FrameRaster& frame);

std::vector<std::uint8_t> encode_png(const FrameRaster& frame);
FrameRaster decode_png(std::span<const std::uint8_t> bytes);

// Patches round-trip through 8-bit PNG, so values are quantized to k/255.
void write_patch_png(const std::filesystem::path& path, const Patch& patch);
Patch read_patch_png(const std::filesystem::path& path);

// Headerless interleaved RGB, width*height*3 bytes.
FrameRaster read_raw_rgb(const std::filesystem::path& path, int width, int height);
void write_raw_rgb(const std::filesystem::path& path, const FrameRaster& frame);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace gestlang::vision
