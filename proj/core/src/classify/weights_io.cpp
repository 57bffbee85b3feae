#include "gestlang/classify/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gestlang/errors.hpp"

namespace gestlang::classify {
namespace {

constexpr char kMagic[8] = {'G', 'E', 'S', 'T', 'C', 'N', 'N', '\0'};

static_assert(std::endian::native == std::endian::little, "weight files assume a little-endian host");

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::kIncompatibleWeights, "weight file is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  void copy(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_weights(const CnnModel& model) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kWeightFileVersion);
  const auto& params = model.parameters();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& t : params) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data.data());
    out.insert(out.end(), raw, raw + t.data.size() * sizeof(float));
  }
  return out;
}

CnnModel deserialize_weights(const std::vector<std::uint8_t>& bytes, const CnnSpec& spec) {
  CnnModel model(spec);
  Reader r(bytes);
  char magic[8];
  r.copy(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error(ErrorKind::kIncompatibleWeights, "bad magic");
  const auto version = r.u32();
  if (version != kWeightFileVersion) {
    throw Error(ErrorKind::kIncompatibleWeights, "unsupported weight file version " + std::to_string(version));
  }
  auto& params = model.parameters();
  if (r.u32() != params.size()) throw Error(ErrorKind::kIncompatibleWeights, "tensor count mismatch");
  for (auto& t : params) {
    const auto len = r.u32();
    r.need(len);
    std::string name(len, '\0');
    r.copy(name.data(), len);
    if (name != t.name) throw Error(ErrorKind::kIncompatibleWeights, "expected tensor " + t.name + ", found " + name);
    const auto rank = r.u32();
    if (rank != t.shape.size()) throw Error(ErrorKind::kIncompatibleWeights, "rank mismatch for " + t.name);
    for (std::size_t i = 0; i < rank; ++i) {
      if (r.u32() != static_cast<std::uint32_t>(t.shape[i])) {
        throw Error(ErrorKind::kIncompatibleWeights, "shape mismatch for " + t.name);
      }
    }
    r.copy(t.data.data(), t.data.size() * sizeof(float));
  }
  if (!r.done()) throw Error(ErrorKind::kIncompatibleWeights, "trailing bytes after last tensor");
  return model;
}

void save_weights(const CnnModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

CnnModel load_weights(const std::filesystem::path& path, const CnnSpec& spec) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_weights(bytes, spec);
}

}  // namespace gestlang::classify
