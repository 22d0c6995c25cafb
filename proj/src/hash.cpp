#include "drplab/util/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace drplab {

std::string git_blob_hash(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;

    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(blob.data(), blob.size(), digest.data(), &len, EVP_sha1(), nullptr);

    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string short_hash(const std::string& full) {
    return full.substr(0, 12);
}

}  // namespace drplab
