#pragma once

#include <stdexcept>
#include <string>

namespace mmi {

/// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory {
  usage,     // bad flags / subcommand
  config,    // missing or invalid config keys
  data,      // bad input data (dimension mismatches, invalid values)
  artifact,  // missing or corrupt run artifacts (checkpoints, manifests)
  training,  // non-finite losses, failed optimization preconditions
  internal,
};

struct Error : std::runtime_error {
  ErrorCategory category;
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), category(cat) {}
};

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return "usage";
    case ErrorCategory::config: return "config";
    case ErrorCategory::data: return "data";
    case ErrorCategory::artifact: return "artifact";
    case ErrorCategory::training: return "training";
    case ErrorCategory::internal: return "internal";
  }
  return "internal";
}

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return 2;
    case ErrorCategory::config: return 3;
    case ErrorCategory::data: return 4;
    case ErrorCategory::artifact: return 5;
    case ErrorCategory::training: return 6;
    case ErrorCategory::internal: return 7;
  }
  return 7;
}

[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCategory::config, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorCategory::data, msg);
}
[[noreturn]] inline void throw_artifact(const std::string& msg) {
  throw Error(ErrorCategory::artifact, msg);
}
[[noreturn]] inline void throw_training(const std::string& msg) {
  throw Error(ErrorCategory::training, msg);
}

}  // namespace mmi
