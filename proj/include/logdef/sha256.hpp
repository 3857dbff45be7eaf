#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace logdef {

// Streaming SHA-256, used for embedding-file integrity and backbone
// parameter digests. Self-contained so file formats stay dependency-free.
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, size_t len);
    std::array<uint8_t, 32> finish();

    static std::array<uint8_t, 32> digest(const void* data, size_t len);
    static std::string hex(const std::array<uint8_t, 32>& d);
    static std::string hex_digest(const void* data, size_t len);

  private:
    void process_block(const uint8_t* block);

    uint32_t state_[8];
    uint64_t total_len_ = 0;
    uint8_t buffer_[64];
    size_t buffer_len_ = 0;
};

} // namespace logdef
