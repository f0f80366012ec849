#ifndef USBEAM_ERROR_HPP
#define USBEAM_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace usbeam {

/// A value or combination of values violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file does not follow its declared format.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset),
        has_offset_(true) {}

  bool has_offset() const { return has_offset_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_ = 0;
  bool has_offset_ = false;
};

/// Pipeline stage failure; wraps the underlying cause with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace usbeam

#endif  // USBEAM_ERROR_HPP
