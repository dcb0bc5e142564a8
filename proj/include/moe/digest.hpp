#ifndef MOE_DIGEST_HPP
#define MOE_DIGEST_HPP

#include <string>

namespace moe {

// Lowercase hex SHA-256 digests, used for manifest integrity checks.
std::string sha256_string(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace moe

#endif
