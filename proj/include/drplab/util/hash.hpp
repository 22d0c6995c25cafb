#pragma once

#include <string>

namespace drplab {

// Git blob hash of a byte string: sha1("blob <len>\0" + content), hex-encoded.
std::string git_blob_hash(const std::string& content);

// First 12 hex chars, the short form written into output files.
std::string short_hash(const std::string& full);

}  // namespace drplab
