#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fixnet {

using Rng = std::mt19937_64;

/// Derives an independent substream seed from a master seed and a label.
/// Streams are keyed by name only, so adding a new label never shifts the
/// values produced for existing ones.
std::uint64_t substream_seed(std::uint64_t master, std::string_view label);

/// Same as above with an integer index appended to the label
/// (e.g. "activations", agent 3).
std::uint64_t substream_seed(std::uint64_t master, std::string_view label,
                             std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::string_view label) {
  return Rng(substream_seed(master, label));
}

inline Rng make_rng(std::uint64_t master, std::string_view label,
                    std::uint64_t index) {
  return Rng(substream_seed(master, label, index));
}

}  // namespace fixnet
