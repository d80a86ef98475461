#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nhep {

// Every module error carries a short machine-readable code next to the
// human-readable message; the CLI serializes both into its error JSON.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kDomain = "domain_error";
inline constexpr const char* kDegenerateField = "degenerate_field";
inline constexpr const char* kSizeMismatch = "size_mismatch";
inline constexpr const char* kNonConvergence = "non_convergence";
inline constexpr const char* kUnclassified = "unclassified";
inline constexpr const char* kNoTransition = "no_transition";
inline constexpr const char* kLoopTooClose = "loop_too_close";
inline constexpr const char* kLoopNotClosed = "loop_not_closed";
inline constexpr const char* kTooManyMissing = "too_many_missing";
inline constexpr const char* kParse = "parse_error";
inline constexpr const char* kConfig = "config_error";
inline constexpr const char* kIo = "io_error";
}  // namespace errc

}  // namespace nhep
