#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tca/hull.hpp"
#include "tca/solvers.hpp"
#include "tca/tensor.hpp"

namespace tca {

enum class TensorLayout { activations, filter_images };

const char* layout_name(TensorLayout layout);
TensorLayout layout_from_name(const std::string& name);

struct SnapshotEntry {
  long task = 0;
  long epoch = 0;
  std::string path;  // resolved against the manifest's directory when relative
};

/// Ordered list of model snapshot dumps. Each file holds a 2-D array of
/// shape (inputs-or-filters x flattened units); all files must agree.
struct SnapshotManifest {
  TensorLayout layout = TensorLayout::activations;
  std::vector<SnapshotEntry> snapshots;
  std::vector<std::string> input_labels;  // empty = unlabeled

  /// Parses the manifest JSON and checks strict (task, epoch) ordering.
  static SnapshotManifest load(const std::string& path);
};

/// Stacks the snapshot files into a (units x inputs x snapshots) tensor.
/// Snapshot labels are "(task i, epoch e)".
Dense3Tensor assemble_tensor(const SnapshotManifest& manifest);

/// tensor.npy (3-D, '<f8') plus tensor_meta.json with axis labels.
void save_tensor(const Dense3Tensor& t, const std::string& dir);
Dense3Tensor load_tensor(const std::string& tensor_path);

/// Writes U.npy, V.npy, W.npy, lambda.npy and meta.json into dir.
void export_factors(const FitResult& result, const std::string& dir,
                    const std::string& source = "");

struct ImportedFactors {
  KruskalFactors factors;
  std::string algorithm;
  std::uint64_t seed = 0;
  double final_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string source;
};

ImportedFactors import_factors(const std::string& dir);

struct NeuronMask {
  std::string layer;
  std::vector<bool> mask;
  std::size_t component = 0;
  std::size_t top_k = 0;
  std::string source;
};

/// Mask selecting the top_k largest entries of factor column u_r; ties go to
/// the lowest index.
NeuronMask export_neuron_mask(const KruskalFactors& f, std::size_t component,
                              std::size_t top_k);

/// Writes <base>.npy ('|b1' vector) and <base>.json (provenance).
void save_neuron_mask(const NeuronMask& mask, const std::string& base_path);

/// CSV with header "class,x,y".
std::vector<EmbeddedPoint> read_embedding_csv(const std::string& path);

/// N x 2 float coordinates plus length-N integer labels.
std::vector<EmbeddedPoint> read_embedding_npy(const std::string& coords_path,
                                              const std::string& labels_path);

}  // namespace tca
