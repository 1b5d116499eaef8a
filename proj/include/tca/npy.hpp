#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tca/error.hpp"

namespace tca {

struct NpyArray {
  std::vector<std::size_t> shape;
  std::string dtype;  // source descr, e.g. "<f4"
  std::vector<double> data;
};

/// Reads a version 1.0 or 2.0 `.npy` file holding a little-endian float32 or
/// float64 C-order array. float32 payloads are widened to float64.
NpyArray read_npy(const std::string& path);

/// Writes a version 1.0 `.npy` file: '<f8', C order, header padded so the
/// total header size is a multiple of 64 bytes.
void write_npy(const std::string& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& data);

/// 1-D '|b1' boolean vector, used for neuron masks.
std::vector<bool> read_npy_bool(const std::string& path);
void write_npy_bool(const std::string& path, const std::vector<bool>& mask);

/// 1-D '<i4'/'<i8' integer vector, used for embedding class labels.
std::vector<std::int64_t> read_npy_int64(const std::string& path);

}  // namespace tca
