#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace simflow::crypto {

// SHA-256, lowercase hex digest.
std::string sha256_hex(std::string_view bytes);

// Digest of a file's raw bytes; nullopt if the file cannot be read.
std::optional<std::string> sha256_file_hex(const std::filesystem::path& path);

}  // namespace simflow::crypto
