#include "tca/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tca/npy.hpp"

namespace fs = std::filesystem;

namespace tca {

const char* layout_name(TensorLayout layout) {
  return layout == TensorLayout::activations ? "activations" : "filter_images";
}

TensorLayout layout_from_name(const std::string& name) {
  if (name == "activations") return TensorLayout::activations;
  if (name == "filter_images") return TensorLayout::filter_images;
  raise(errc::io_error, "unknown tensor layout '" + name + "'");
}

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::io_error, path + ": " + e.what());
  }
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  out << text;
  if (!out) raise(errc::io_error, "short write to " + path);
}

Matrix matrix_from_npy(const std::string& path) {
  NpyArray array = read_npy(path);
  if (array.shape.size() != 2)
    raise(errc::io_error, path + " is not a 2-D array");
  return Matrix::from_data(array.shape[0], array.shape[1], std::move(array.data));
}

std::string snapshot_label(const SnapshotEntry& entry) {
  return "(task " + std::to_string(entry.task) + ", epoch " + std::to_string(entry.epoch) + ")";
}

}  // namespace

SnapshotManifest SnapshotManifest::load(const std::string& path) {
  nlohmann::json doc = load_json(path);
  SnapshotManifest manifest;
  if (!doc.contains("layout") || !doc.contains("snapshots"))
    raise(errc::io_error, path + " needs 'layout' and 'snapshots'");
  manifest.layout = layout_from_name(doc["layout"].get<std::string>());

  fs::path base = fs::path(path).parent_path();
  for (const auto& item : doc["snapshots"]) {
    SnapshotEntry entry;
    entry.task = item.at("task").get<long>();
    entry.epoch = item.at("epoch").get<long>();
    fs::path file = item.at("path").get<std::string>();
    entry.path = file.is_absolute() ? file.string() : (base / file).string();
    manifest.snapshots.push_back(std::move(entry));
  }
  if (manifest.snapshots.empty()) raise(errc::empty_manifest, path);

  for (std::size_t i = 1; i < manifest.snapshots.size(); ++i) {
    const auto& prev = manifest.snapshots[i - 1];
    const auto& cur = manifest.snapshots[i];
    if (std::pair(prev.task, prev.epoch) >= std::pair(cur.task, cur.epoch))
      raise(errc::io_error, path + ": snapshots must be strictly ordered by (task, epoch)");
  }

  if (doc.contains("input_labels"))
    for (const auto& label : doc["input_labels"])
      manifest.input_labels.push_back(label.is_string()
                                          ? label.get<std::string>()
                                          : label.dump());
  return manifest;
}

Dense3Tensor assemble_tensor(const SnapshotManifest& manifest) {
  if (manifest.snapshots.empty()) raise(errc::empty_manifest, "manifest has no snapshots");

  const std::size_t K = manifest.snapshots.size();
  std::size_t I = 0, J = 0;
  std::vector<double> data;
  std::vector<std::string> snapshot_labels;
  snapshot_labels.reserve(K);

  for (std::size_t k = 0; k < K; ++k) {
    const SnapshotEntry& entry = manifest.snapshots[k];
    Matrix snapshot = matrix_from_npy(entry.path);  // inputs x units
    if (k == 0) {
      J = snapshot.rows;
      I = snapshot.cols;
      data.assign(I * J * K, 0.0);
      if (!manifest.input_labels.empty() && manifest.input_labels.size() != J)
        raise(errc::length_mismatch, "manifest has " +
                                         std::to_string(manifest.input_labels.size()) +
                                         " input labels for " + std::to_string(J) + " inputs");
    } else if (snapshot.rows != J || snapshot.cols != I) {
      raise(errc::shape_mismatch_across_snapshots,
            entry.path + " is " + std::to_string(snapshot.rows) + "x" +
                std::to_string(snapshot.cols) + ", expected " + std::to_string(J) + "x" +
                std::to_string(I));
    }
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t i = 0; i < I; ++i)
        data[(i * J + j) * K + k] = snapshot(j, i);
    snapshot_labels.push_back(snapshot_label(entry));
  }

  std::array<AxisLabels, 3> labels;
  if (!manifest.input_labels.empty()) labels[1] = manifest.input_labels;
  labels[2] = std::move(snapshot_labels);
  return Dense3Tensor({I, J, K}, std::move(data), std::move(labels));
}

void save_tensor(const Dense3Tensor& t, const std::string& dir) {
  fs::create_directories(dir);
  write_npy((fs::path(dir) / "tensor.npy").string(),
            {t.dim(0), t.dim(1), t.dim(2)}, t.values());

  nlohmann::json meta;
  meta["dims"] = {t.dim(0), t.dim(1), t.dim(2)};
  const char* axis_names[3] = {"units", "inputs", "snapshots"};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (t.labels(axis))
      meta["axis_labels"][axis_names[axis]] = *t.labels(axis);
  }
  write_text((fs::path(dir) / "tensor_meta.json").string(), meta.dump(2) + "\n");
}

Dense3Tensor load_tensor(const std::string& tensor_path) {
  NpyArray array = read_npy(tensor_path);
  if (array.shape.size() != 3)
    raise(errc::io_error, tensor_path + " is not a 3-D array");

  std::array<AxisLabels, 3> labels;
  fs::path meta_path = fs::path(tensor_path).parent_path() / "tensor_meta.json";
  if (fs::exists(meta_path)) {
    nlohmann::json meta = load_json(meta_path.string());
    if (meta.contains("axis_labels")) {
      const char* axis_names[3] = {"units", "inputs", "snapshots"};
      for (std::size_t axis = 0; axis < 3; ++axis)
        if (meta["axis_labels"].contains(axis_names[axis]))
          labels[axis] = meta["axis_labels"][axis_names[axis]]
                             .get<std::vector<std::string>>();
    }
  }
  return Dense3Tensor({array.shape[0], array.shape[1], array.shape[2]},
                      std::move(array.data), std::move(labels));
}

void export_factors(const FitResult& result, const std::string& dir,
                    const std::string& source) {
  const KruskalFactors& f = result.factors;
  f.validate();
  fs::create_directories(dir);
  fs::path base(dir);
  write_npy((base / "U.npy").string(), {f.u.rows, f.u.cols}, f.u.data);
  write_npy((base / "V.npy").string(), {f.v.rows, f.v.cols}, f.v.data);
  write_npy((base / "W.npy").string(), {f.w.rows, f.w.cols}, f.w.data);
  write_npy((base / "lambda.npy").string(), {f.weights.size()}, f.weights);

  nlohmann::json meta;
  meta["algorithm"] = algorithm_name(result.algorithm);
  meta["rank"] = f.rank();
  meta["seed"] = result.seed;
  meta["final_error"] = result.final_error;
  meta["iterations"] = result.iterations;
  meta["converged"] = result.converged;
  meta["degenerate_components"] = result.degenerate_components;
  meta["dims"] = {f.u.rows, f.v.rows, f.w.rows};
  if (!source.empty()) meta["source"] = source;
  write_text((base / "meta.json").string(), meta.dump(2) + "\n");
}

ImportedFactors import_factors(const std::string& dir) {
  fs::path base(dir);
  ImportedFactors out;
  out.factors.u = matrix_from_npy((base / "U.npy").string());
  out.factors.v = matrix_from_npy((base / "V.npy").string());
  out.factors.w = matrix_from_npy((base / "W.npy").string());

  NpyArray lambda = read_npy((base / "lambda.npy").string());
  if (lambda.shape.size() != 1)
    raise(errc::io_error, "lambda.npy must be 1-D");
  out.factors.weights = std::move(lambda.data);
  out.factors.validate();

  nlohmann::json meta = load_json((base / "meta.json").string());
  out.algorithm = meta.value("algorithm", "");
  out.seed = meta.value("seed", std::uint64_t{0});
  out.final_error = meta.value("final_error", 0.0);
  out.iterations = meta.value("iterations", std::size_t{0});
  out.converged = meta.value("converged", false);
  out.source = meta.value("source", "");
  return out;
}

NeuronMask export_neuron_mask(const KruskalFactors& f, std::size_t component,
                              std::size_t top_k) {
  f.validate();
  if (component >= f.rank())
    raise(errc::index_out_of_range,
          "component " + std::to_string(component) + " of " + std::to_string(f.rank()));
  if (top_k > f.u.rows)
    raise(errc::index_out_of_range, "top_k " + std::to_string(top_k) + " exceeds " +
                                        std::to_string(f.u.rows) + " units");

  std::vector<std::size_t> order(f.u.rows);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.u(a, component) > f.u(b, component);  // ties keep the lower index
  });

  NeuronMask mask;
  mask.component = component;
  mask.top_k = top_k;
  mask.mask.assign(f.u.rows, false);
  for (std::size_t n = 0; n < top_k; ++n) mask.mask[order[n]] = true;
  return mask;
}

void save_neuron_mask(const NeuronMask& mask, const std::string& base_path) {
  write_npy_bool(base_path + ".npy", mask.mask);
  nlohmann::json meta;
  meta["layer"] = mask.layer;
  meta["component"] = mask.component;
  meta["top_k"] = mask.top_k;
  meta["source"] = mask.source;
  meta["units"] = mask.mask.size();
  write_text(base_path + ".json", meta.dump(2) + "\n");
}

std::vector<EmbeddedPoint> read_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) raise(errc::io_error, path + " is empty");

  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
  };

  std::vector<std::string> header = split(line);
  if (header.size() != 3 || header[0] != "class" || header[1] != "x" || header[2] != "y")
    raise(errc::io_error, path + " must start with header 'class,x,y'");

  std::vector<EmbeddedPoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line);
    if (fields.size() != 3)
      raise(errc::io_error, path + ":" + std::to_string(line_no) + " has " +
                                std::to_string(fields.size()) + " fields");
    EmbeddedPoint p;
    p.class_label = fields[0];
    try {
      p.x = std::stod(fields[1]);
      p.y = std::stod(fields[2]);
    } catch (...) {
      raise(errc::io_error, path + ":" + std::to_string(line_no) + " has bad coordinates");
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<EmbeddedPoint> read_embedding_npy(const std::string& coords_path,
                                              const std::string& labels_path) {
  NpyArray coords = read_npy(coords_path);
  if (coords.shape.size() != 2 || coords.shape[1] != 2)
    raise(errc::io_error, coords_path + " must be N x 2");
  std::vector<std::int64_t> labels = read_npy_int64(labels_path);
  if (labels.size() != coords.shape[0])
    raise(errc::length_mismatch, "coordinates and labels disagree on N");

  std::vector<EmbeddedPoint> points(labels.size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    points[n].x = coords.data[2 * n];
    points[n].y = coords.data[2 * n + 1];
    points[n].class_label = std::to_string(labels[n]);
  }
  return points;
}

}  // namespace tca
