#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "la3/error.hpp"

namespace la3 {

class IoError : public ExternalError {
 public:
  using ExternalError::ExternalError;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`, so readers
/// see either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace la3
