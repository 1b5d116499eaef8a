#include "tca/synth.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "tca/rng.hpp"
#include "tca/solvers.hpp"

namespace tca {

namespace {

void validate_spec(const PlantedSpec& spec) {
  const auto [I, J, K] = spec.dims;
  if (I == 0 || J == 0 || K == 0) raise(errc::invalid_spec, "dims must be positive");
  if (spec.rank == 0) raise(errc::invalid_spec, "rank must be >= 1");
  std::size_t bound = std::min({I * J, J * K, I * K});
  if (spec.rank > bound)
    raise(errc::invalid_spec, "rank " + std::to_string(spec.rank) +
                                  " exceeds practical bound " + std::to_string(bound));
  if (spec.noise_level < 0.0 || spec.noise_level >= 1.0)
    raise(errc::invalid_spec, "noise_level must lie in [0, 1)");

  if (const auto* gated = std::get_if<TaskGated>(&spec.structure)) {
    if (gated->boundaries.empty() || gated->boundaries.back() != K)
      raise(errc::invalid_spec, "task boundaries must end at K");
    for (std::size_t t = 0; t < gated->boundaries.size(); ++t) {
      std::size_t begin = t == 0 ? 0 : gated->boundaries[t - 1];
      if (gated->boundaries[t] <= begin)
        raise(errc::invalid_spec, "task windows must be nonempty and increasing");
    }
    if (gated->u_support <= 0.0 || gated->u_support > 1.0)
      raise(errc::invalid_spec, "u_support must lie in (0, 1]");
  }
}

KruskalFactors plant_dense(const PlantedSpec& spec, Rng& rng) {
  KruskalFactors f;
  f.weights.assign(spec.rank, 1.0);
  f.u = Matrix(spec.dims[0], spec.rank);
  f.v = Matrix(spec.dims[1], spec.rank);
  f.w = Matrix(spec.dims[2], spec.rank);
  for (Matrix* m : {&f.u, &f.v, &f.w})
    for (double& e : m->data) e = rng.uniform01();
  return f;
}

KruskalFactors plant_task_gated(const PlantedSpec& spec, const TaskGated& gated, Rng& rng) {
  const auto [I, J, K] = spec.dims;
  const std::size_t R = spec.rank;
  KruskalFactors f;
  f.weights.assign(R, 1.0);
  f.u = Matrix(I, R);
  f.v = Matrix(J, R);
  f.w = Matrix(K, R);

  std::size_t support = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(gated.u_support * static_cast<double>(I))));
  const std::size_t n_tasks = gated.boundaries.size();

  // Distinct concentrated inputs while they last, then reuse.
  std::vector<std::size_t> input_order = rng.sample_without_replacement(J, std::min(J, R));

  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t idx : rng.sample_without_replacement(I, support))
      f.u(idx, r) = 0.25 + 0.75 * rng.uniform01();

    std::size_t input = r < input_order.size()
                            ? input_order[r]
                            : static_cast<std::size_t>(rng.uniform_below(J));
    f.v(input, r) = 1.0;

    std::size_t task = r % n_tasks;
    std::size_t begin = task == 0 ? 0 : gated.boundaries[task - 1];
    std::size_t end = gated.boundaries[task];
    double length = static_cast<double>(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      double phase = (static_cast<double>(k - begin) + 0.5) / length;
      f.w(k, r) = 0.5 * (1.0 - std::cos(2.0 * M_PI * phase));
    }
  }
  return f;
}

}  // namespace

Planted generate(const PlantedSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);

  KruskalFactors truth = std::holds_alternative<DenseNonneg>(spec.structure)
                             ? plant_dense(spec, rng)
                             : plant_task_gated(spec, std::get<TaskGated>(spec.structure), rng);

  Dense3Tensor signal = reconstruct(truth, spec.dims);
  std::vector<double> data = signal.values();

  if (spec.noise_level > 0.0) {
    std::vector<double> noise(data.size());
    double norm_sq = 0.0;
    for (double& n : noise) {
      n = rng.uniform01();
      norm_sq += n * n;
    }
    double scale = spec.noise_level * frobenius_norm(signal) / std::sqrt(norm_sq);
    for (std::size_t n = 0; n < data.size(); ++n)
      data[n] = std::max(0.0, data[n] + scale * noise[n]);
  }

  return Planted{Dense3Tensor(spec.dims, std::move(data)), normalize_components(truth)};
}

PlantedSpec PlantedSpec::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(errc::invalid_spec, e.what());
  }
  PlantedSpec spec;
  try {
    auto dims = doc.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3) raise(errc::invalid_spec, "dims must have 3 entries");
    spec.dims = {dims[0], dims[1], dims[2]};
    spec.rank = doc.at("rank").get<std::size_t>();
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.noise_level = doc.value("noise_level", 0.0);

    const auto& structure = doc.at("structure");
    std::string type = structure.is_string() ? structure.get<std::string>()
                                             : structure.at("type").get<std::string>();
    if (type == "dense_nonneg") {
      spec.structure = DenseNonneg{};
    } else if (type == "task_gated") {
      TaskGated gated;
      gated.boundaries = structure.at("boundaries").get<std::vector<std::size_t>>();
      gated.u_support = structure.value("u_support", 0.1);
      spec.structure = gated;
    } else {
      raise(errc::invalid_spec, "unknown structure '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::invalid_spec, e.what());
  }
  return spec;
}

std::string PlantedSpec::to_json_text(int indent) const {
  nlohmann::json doc;
  doc["dims"] = {dims[0], dims[1], dims[2]};
  doc["rank"] = rank;
  doc["seed"] = seed;
  doc["noise_level"] = noise_level;
  if (std::holds_alternative<DenseNonneg>(structure)) {
    doc["structure"] = "dense_nonneg";
  } else {
    const auto& gated = std::get<TaskGated>(structure);
    doc["structure"] = {{"type", "task_gated"},
                        {"boundaries", gated.boundaries},
                        {"u_support", gated.u_support}};
  }
  return doc.dump(indent) + "\n";
}

}  // namespace tca
