// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace facetlens {

/// Base class for every error raised by the library. Carries a plain-text
/// message suitable for CLI diagnostics and HTTP error bodies.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required pipeline artifact is missing; names the stage that produces it.
class MissingStageError : public Error {
 public:
  explicit MissingStageError(std::string stage)
      : Error("missing upstream artifact: run the '" + stage + "' stage first"),
        stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace facetlens
