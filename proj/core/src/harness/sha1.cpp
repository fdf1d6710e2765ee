#include "rrlab/harness/sha1.hpp"

#include <array>
#include <cstdint>
#include <cstring>

namespace rrlab::harness {

namespace {
uint32_t rotl(uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }
}  // namespace

std::string sha1_hex(const std::string& data) {
  uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};

  // Pad to a multiple of 64 bytes: 0x80, zeros, 64-bit big-endian bit length.
  std::string msg = data;
  uint64_t bit_len = static_cast<uint64_t>(data.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<char>((bit_len >> (8 * i)) & 0xff));

  std::array<uint32_t, 80> w{};
  for (size_t chunk = 0; chunk < msg.size(); chunk += 64) {
    for (int i = 0; i < 16; ++i) {
      w[static_cast<size_t>(i)] =
          (static_cast<uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i])) << 24) |
          (static_cast<uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 1])) << 16) |
          (static_cast<uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 2])) << 8) |
          static_cast<uint32_t>(static_cast<unsigned char>(msg[chunk + 4 * i + 3]));
    }
    for (int i = 16; i < 80; ++i)
      w[static_cast<size_t>(i)] =
          rotl(w[static_cast<size_t>(i - 3)] ^ w[static_cast<size_t>(i - 8)] ^
                   w[static_cast<size_t>(i - 14)] ^ w[static_cast<size_t>(i - 16)],
               1);

    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      uint32_t tmp = rotl(a, 5) + f + e + k + w[static_cast<size_t>(i)];
      e = d;
      d = c;
      c = rotl(b, 30);
      b = a;
      a = tmp;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  std::string hex;
  hex.reserve(40);
  const char* digits = "0123456789abcdef";
  for (uint32_t v : h)
    for (int i = 7; i >= 0; --i) hex.push_back(digits[(v >> (4 * i)) & 0xf]);
  return hex;
}

std::string git_blob_hash(const std::string& data) {
  std::string blob = "blob " + std::to_string(data.size());
  blob.push_back('\0');
  blob += data;
  return sha1_hex(blob);
}

}  // namespace rrlab::harness
