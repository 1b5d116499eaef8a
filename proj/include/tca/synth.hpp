#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tca/kruskal.hpp"
#include "tca/tensor.hpp"

namespace tca {

struct DenseNonneg {};

/// Components gated in time: each temporal factor is a raised-cosine bump
/// confined to one task's snapshot window, each unit factor is sparse, and
/// each input factor concentrates on a single input.
struct TaskGated {
  /// Cumulative task end indices on the snapshot axis; the last entry must
  /// equal K. Example: tasks of 8 snapshots each in K=24 -> {8, 16, 24}.
  std::vector<std::size_t> boundaries;
  double u_support = 0.1;  // fraction of units active per component
};

struct PlantedSpec {
  std::array<std::size_t, 3> dims{};
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  /// Noise Frobenius norm as a fraction of the signal Frobenius norm.
  double noise_level = 0.0;
  std::variant<DenseNonneg, TaskGated> structure = DenseNonneg{};

  static PlantedSpec from_json_text(const std::string& text);
  std::string to_json_text(int indent = 2) const;
};

struct Planted {
  Dense3Tensor tensor;
  KruskalFactors truth;  // normalized
};

/// Deterministic planted tensor: reconstruct(truth) plus nonnegative noise
/// rescaled to noise_level * ||signal||_F, clipped at zero.
Planted generate(const PlantedSpec& spec);

}  // namespace tca
