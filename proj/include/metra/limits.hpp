#pragma once

#include <cstdint>

namespace metra {

/// Resource caps for the exponential searches and fixpoints. Exceeding any of
/// them raises ResourceError.
struct Limits {
  std::uint64_t valuations = 1'000'000;      // valuation enumeration
  std::uint64_t sections = 1'000'000;        // reflexive-quotient search nodes
  std::uint64_t correspondences = 20;        // bound on |X|*|Y| for Gromov-Hausdorff
  std::uint64_t decreases = 1'000'000;       // congruence fixpoint decrements
  std::uint64_t terms = 100'000;             // term enumeration size
  std::uint64_t isomorphism_nodes = 5'000'000;
  std::uint64_t subsets = 1'000'000;         // subset searches (weak compactness, filters)

  friend bool operator==(const Limits&, const Limits&) = default;
};

}  // namespace metra
