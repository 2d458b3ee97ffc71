#pragma once

#include <stdexcept>
#include <string>

namespace hateprobe {

// Fatal input problems: unreadable files, malformed configs, precondition
// violations on loaded data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A strategy cannot be applied to a dataset / sample.
class StrategyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, int attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

}  // namespace hateprobe
