#include "gestlang/vision/image_io.hpp"

#include <png.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gestlang/errors.hpp"

namespace gestlang::vision {
namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> finish_read(PngImage& png, const std::string& what) {
  png.image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat, what + ": " + png.image.message);
  }
  return buf;
}

void write_rgb_png(const std::filesystem::path& path, int w, int h, const std::uint8_t* data) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(w);
  png.image.height = static_cast<png_uint_32>(h);
  png.image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string() + ": " + png.image.message);
  }
}

}  // namespace

FrameRaster read_png(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw Error(ErrorKind::kIo, "cannot read " + path.string() + ": " + png.image.message);
  }
  const int w = static_cast<int>(png.image.width);
  const int h = static_cast<int>(png.image.height);
  return FrameRaster(w, h, finish_read(png, path.string()));
}

void write_png(const std::filesystem::path& path, const FrameRaster& frame) {
  write_rgb_png(path, frame.width(), frame.height(), frame.bytes().data());
}

std::vector<std::uint8_t> encode_png(const FrameRaster& frame) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(frame.width());
  png.image.height = static_cast<png_uint_32>(frame.height());
  png.image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, frame.bytes().data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat, std::string("png encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, frame.bytes().data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat, std::string("png encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

FrameRaster decode_png(std::span<const std::uint8_t> bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::kFormat, std::string("png decode failed: ") + png.image.message);
  }
  const int w = static_cast<int>(png.image.width);
  const int h = static_cast<int>(png.image.height);
  return FrameRaster(w, h, finish_read(png, "png decode"));
}

void write_patch_png(const std::filesystem::path& path, const Patch& patch) {
  std::vector<std::uint8_t> buf(Patch::kValues);
  for (int i = 0; i < Patch::kValues; ++i) {
    buf[i] = static_cast<std::uint8_t>(std::lround(std::clamp(patch.values[i], 0.0f, 1.0f) * 255.0f));
  }
  write_rgb_png(path, Patch::kSize, Patch::kSize, buf.data());
}

Patch read_patch_png(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw Error(ErrorKind::kIo, "cannot read " + path.string() + ": " + png.image.message);
  }
  if (png.image.width != Patch::kSize || png.image.height != Patch::kSize) {
    throw Error(ErrorKind::kFormat, path.string() + ": patch must be 32x32");
  }
  auto buf = finish_read(png, path.string());
  Patch p;
  for (int i = 0; i < Patch::kValues; ++i) p.values[i] = static_cast<float>(buf[i]) / 255.0f;
  return p;
}

FrameRaster read_raw_rgb(const std::filesystem::path& path, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()) || in.peek() != EOF) {
    throw Error(ErrorKind::kFormat, path.string() + ": size does not match " + std::to_string(width) + "x" +
                                        std::to_string(height) + " RGB");
  }
  return FrameRaster(width, height, std::move(buf));
}

void write_raw_rgb(const std::filesystem::path& path, const FrameRaster& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(frame.bytes().data()), static_cast<std::streamsize>(frame.bytes().size()));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorKind::kFormat, "base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorKind::kFormat, "invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace gestlang::vision
