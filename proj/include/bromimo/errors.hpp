#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bromimo {

// Configuration failed one or more invariant checks; carries every violation,
// not just the first.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string msg = "configuration invalid:";
    for (const auto& s : issues) {
      msg += "\n  - ";
      msg += s;
    }
    return msg;
  }

  std::vector<std::string> issues_;
};

// A numerical routine could not produce a trustworthy answer (bracket
// expansion exhausted, degenerate input, unbounded inner problem).
class solver_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file could not be read or decoded.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bromimo
