#pragma once

#include <string>

namespace rrlab::harness {

// SHA-1 digest as lowercase hex.
std::string sha1_hex(const std::string& data);

// Hash of "blob <len>\0<data>", the convention version-control systems use
// for content-addressing file bodies.
std::string git_blob_hash(const std::string& data);

}  // namespace rrlab::harness
