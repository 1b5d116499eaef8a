#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tca/error.hpp"

namespace tca {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct EmbeddedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string class_label;
};

struct Centroid {
  std::string class_label;
  double x = 0.0;
  double y = 0.0;
};

/// Per-class arithmetic mean of the 2-D coordinates. Output is ordered by
/// class id: numerically when every label parses as an integer, otherwise
/// lexicographically.
std::vector<Centroid> class_centroids(const std::vector<EmbeddedPoint>& points);

/// Convex hull vertex indices in counter-clockwise order, starting from the
/// lowest-(y, then x) point. Interior points and collinear points on hull
/// edges are excluded; duplicate positions report their lowest input index.
/// Orientation uses a 1e-12 cross-product tolerance.
std::vector<std::size_t> quickhull(const std::vector<Point2>& points);

struct TaskPlan {
  std::vector<std::string> initial_classes;
  std::vector<std::vector<std::string>> later_tasks;
  std::vector<std::string> hull_classes;
  std::uint64_t seed = 0;
};

/// Draws num_initial classes uniformly from the hull of the class centroids,
/// then deals the remaining classes round-robin (after a seeded shuffle) into
/// num_later_tasks groups whose sizes differ by at most one.
TaskPlan curate_tasks(const std::vector<Centroid>& centroids, std::size_t num_initial,
                      std::size_t num_later_tasks, std::uint64_t seed);

std::string task_plan_to_json(const TaskPlan& plan, int indent = 2);

}  // namespace tca
