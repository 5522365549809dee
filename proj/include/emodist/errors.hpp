// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <stdexcept>
#include <string>

namespace emodist {

// Invalid or inconsistent configuration: bad option values, missing paths,
// malformed config JSON. Maps to its own CLI exit code.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or unusable input data: broken corpus rows, schema violations,
// empty results where the pipeline requires content.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emodist
