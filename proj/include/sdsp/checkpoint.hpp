#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdsp/tensor.hpp"

namespace sdsp {

// Little-endian binary container: magic "SDSP", format version, a 32-byte
// digest of the resolved config, then named tensor records
// (u32 name length, name bytes, u32 rank, u32 extents, f64 payload) until
// end of file. Record order is fixed by the writer, so save/load/save is
// byte-identical.
struct Checkpoint {
  std::array<unsigned char, 32> config_digest{};
  std::vector<std::pair<std::string, Tensor>> records;

  const Tensor* find(const std::string& name) const;
};

inline constexpr char kCheckpointMagic[4] = {'S', 'D', 'S', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// SHA-256 of the canonical resolved-config text.
std::array<unsigned char, 32> config_digest(std::string_view text);
std::string digest_hex(const std::array<unsigned char, 32>& digest);

}  // namespace sdsp
