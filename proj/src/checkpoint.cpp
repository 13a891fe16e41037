#include "sdsp/checkpoint.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "sdsp/error.hpp"

namespace sdsp {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw IoError(path + ": truncated checkpoint");
  return v;
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : records)
    if (n == name) return &t;
  return nullptr;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  out.write(reinterpret_cast<const char*>(ckpt.config_digest.data()),
            ckpt.config_digest.size());
  for (const auto& [name, t] : ckpt.records) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw IoError(path + ": not a checkpoint file (bad magic)");
  const std::uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion)
    throw IoError(path + ": unsupported checkpoint version " +
                  std::to_string(version));
  Checkpoint ckpt;
  if (!in.read(reinterpret_cast<char*>(ckpt.config_digest.data()),
               ckpt.config_digest.size()))
    throw IoError(path + ": truncated checkpoint");

  while (true) {
    std::uint32_t name_len = 0;
    if (!in.read(reinterpret_cast<char*>(&name_len), sizeof name_len)) {
      if (in.eof()) break;
      throw IoError(path + ": read failed");
    }
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len))
      throw IoError(path + ": truncated record name");
    const std::uint32_t rank = get_u32(in, path);
    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = get_u32(in, path);
      numel *= d;
    }
    if (rank == 0) numel = 0;
    Tensor t = Tensor::zeros(shape);
    if (!in.read(reinterpret_cast<char*>(t.data.data()),
                 static_cast<std::streamsize>(numel * sizeof(double))))
      throw IoError(path + ": truncated payload for record " + name);
    ckpt.records.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

std::array<unsigned char, 32> config_digest(std::string_view text) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size())
    throw NumericError("sha256 digest failed");
  return out;
}

std::string digest_hex(const std::array<unsigned char, 32>& digest) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (unsigned char b : digest) {
    s += hex[b >> 4];
    s += hex[b & 0xf];
  }
  return s;
}

}  // namespace sdsp
