#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trc {

/// Domain error carrying a stable machine-readable kind ("MissingCell",
/// "GridOverflow", ...) ahead of the human-readable message. The CLI maps
/// kinds onto exit codes; tests match on kind().
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace trc
