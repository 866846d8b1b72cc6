#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace metra {

/// Outcome of a check. A failed verdict names the violated condition in
/// `code` and carries element ids (or other indices) in `witness`.
struct Verdict {
  bool ok = true;
  std::string code;
  std::string message;
  std::vector<std::size_t> witness;

  static Verdict pass() { return {}; }
  static Verdict fail(std::string code, std::string message,
                      std::vector<std::size_t> witness = {}) {
    return {false, std::move(code), std::move(message), std::move(witness)};
  }

  explicit operator bool() const noexcept { return ok; }
};

}  // namespace metra
