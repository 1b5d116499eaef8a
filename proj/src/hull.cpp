#include "tca/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "tca/rng.hpp"

namespace tca {

namespace {

constexpr double kOrientTol = 1e-12;

double cross(const Point2& a, const Point2& b, const Point2& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

bool all_labels_numeric(const std::vector<Centroid>& cs) {
  for (const auto& c : cs) {
    if (c.class_label.empty()) return false;
    std::size_t pos = 0;
    try {
      (void)std::stoll(c.class_label, &pos);
    } catch (...) {
      return false;
    }
    if (pos != c.class_label.size()) return false;
  }
  return true;
}

void sort_by_class_id(std::vector<Centroid>& cs) {
  if (all_labels_numeric(cs)) {
    std::sort(cs.begin(), cs.end(), [](const Centroid& a, const Centroid& b) {
      return std::stoll(a.class_label) < std::stoll(b.class_label);
    });
  } else {
    std::sort(cs.begin(), cs.end(), [](const Centroid& a, const Centroid& b) {
      return a.class_label < b.class_label;
    });
  }
}

/// Emits the hull vertices strictly between a and b in walk order, drawn from
/// candidates strictly right of the directed chord a->b.
void hull_between(const std::vector<Point2>& pts, const std::vector<std::size_t>& candidates,
                  std::size_t a, std::size_t b, std::vector<std::size_t>& out) {
  if (candidates.empty()) return;
  std::size_t farthest = candidates.front();
  double best = -cross(pts[a], pts[b], pts[farthest]);
  for (std::size_t idx : candidates) {
    double d = -cross(pts[a], pts[b], pts[idx]);  // positive: right of a->b
    if (d > best) {
      best = d;
      farthest = idx;
    }
  }

  std::vector<std::size_t> right_ac, right_cb;
  for (std::size_t idx : candidates) {
    if (idx == farthest) continue;
    if (cross(pts[a], pts[farthest], pts[idx]) < -kOrientTol) right_ac.push_back(idx);
    else if (cross(pts[farthest], pts[b], pts[idx]) < -kOrientTol) right_cb.push_back(idx);
  }
  hull_between(pts, right_ac, a, farthest, out);
  out.push_back(farthest);
  hull_between(pts, right_cb, farthest, b, out);
}

}  // namespace

std::vector<Centroid> class_centroids(const std::vector<EmbeddedPoint>& points) {
  if (points.empty()) raise(errc::empty_class_set, "no embedded points");
  std::map<std::string, std::pair<Point2, std::size_t>> sums;
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      raise(errc::non_finite_entry, "embedding coordinate for class " + p.class_label);
    auto& slot = sums[p.class_label];
    slot.first.x += p.x;
    slot.first.y += p.y;
    slot.second += 1;
  }
  std::vector<Centroid> out;
  out.reserve(sums.size());
  for (const auto& [label, acc] : sums)
    out.push_back({label, acc.first.x / static_cast<double>(acc.second),
                   acc.first.y / static_cast<double>(acc.second)});
  sort_by_class_id(out);
  return out;
}

std::vector<std::size_t> quickhull(const std::vector<Point2>& points) {
  // Collapse duplicate positions onto their lowest input index.
  std::vector<std::size_t> unique;
  {
    std::map<std::pair<double, double>, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i)
      seen.try_emplace({points[i].x, points[i].y}, i);
    for (const auto& [pos, idx] : seen) unique.push_back(idx);
  }
  if (unique.size() < 3)
    raise(errc::degenerate_input, "hull needs at least 3 distinct points");

  // Extremes by (x, then y).
  auto lex_less = [&](std::size_t a, std::size_t b) {
    if (points[a].x != points[b].x) return points[a].x < points[b].x;
    return points[a].y < points[b].y;
  };
  std::size_t leftmost = unique[0], rightmost = unique[0];
  for (std::size_t idx : unique) {
    if (lex_less(idx, leftmost)) leftmost = idx;
    if (lex_less(rightmost, idx)) rightmost = idx;
  }

  std::vector<std::size_t> below, above;
  bool any_off_line = false;
  for (std::size_t idx : unique) {
    if (idx == leftmost || idx == rightmost) continue;
    double c = cross(points[leftmost], points[rightmost], points[idx]);
    if (std::abs(c) > kOrientTol) any_off_line = true;
    if (c < -kOrientTol) below.push_back(idx);
    else if (c > kOrientTol) above.push_back(idx);
  }
  if (!any_off_line) raise(errc::degenerate_input, "all points are collinear");

  // Counter-clockwise: lower chain left->right, then upper chain right->left.
  std::vector<std::size_t> hull;
  hull.push_back(leftmost);
  hull_between(points, below, leftmost, rightmost, hull);
  hull.push_back(rightmost);
  hull_between(points, above, rightmost, leftmost, hull);

  // Rotate so the walk starts at the lowest-(y, then x) vertex.
  std::size_t start = 0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const Point2 &a = points[hull[i]], &b = points[hull[start]];
    if (a.y < b.y || (a.y == b.y && a.x < b.x)) start = i;
  }
  std::rotate(hull.begin(), hull.begin() + static_cast<std::ptrdiff_t>(start), hull.end());
  return hull;
}

TaskPlan curate_tasks(const std::vector<Centroid>& centroids, std::size_t num_initial,
                      std::size_t num_later_tasks, std::uint64_t seed) {
  std::vector<Point2> positions;
  positions.reserve(centroids.size());
  for (const auto& c : centroids) positions.push_back({c.x, c.y});

  std::vector<std::size_t> hull = quickhull(positions);
  TaskPlan plan;
  plan.seed = seed;
  for (std::size_t idx : hull) plan.hull_classes.push_back(centroids[idx].class_label);

  if (hull.size() < num_initial)
    raise(errc::hull_too_small, "hull has " + std::to_string(hull.size()) +
                                    " classes, need " + std::to_string(num_initial));

  Rng rng(seed);
  std::vector<std::size_t> picked = rng.sample_without_replacement(hull.size(), num_initial);
  std::sort(picked.begin(), picked.end());
  std::vector<bool> in_initial(centroids.size(), false);
  for (std::size_t p : picked) {
    plan.initial_classes.push_back(plan.hull_classes[p]);
    in_initial[hull[p]] = true;
  }

  std::vector<std::string> remaining;
  for (std::size_t i = 0; i < centroids.size(); ++i)
    if (!in_initial[i]) remaining.push_back(centroids[i].class_label);

  if (remaining.size() < num_later_tasks || (num_later_tasks == 0 && !remaining.empty()))
    raise(errc::too_many_tasks, std::to_string(remaining.size()) + " classes left for " +
                                    std::to_string(num_later_tasks) + " tasks");

  rng.shuffle(remaining);
  plan.later_tasks.resize(num_later_tasks);
  for (std::size_t i = 0; i < remaining.size(); ++i)
    plan.later_tasks[i % num_later_tasks].push_back(std::move(remaining[i]));
  return plan;
}

std::string task_plan_to_json(const TaskPlan& plan, int indent) {
  auto encode_label = [](const std::string& label) -> nlohmann::json {
    std::size_t pos = 0;
    try {
      long long v = std::stoll(label, &pos);
      if (pos == label.size()) return v;
    } catch (...) {
    }
    return label;
  };
  nlohmann::json initial = nlohmann::json::array();
  for (const auto& c : plan.initial_classes) initial.push_back(encode_label(c));
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& task : plan.later_tasks) {
    nlohmann::json group = nlohmann::json::array();
    for (const auto& c : task) group.push_back(encode_label(c));
    tasks.push_back(group);
  }
  nlohmann::json hull = nlohmann::json::array();
  for (const auto& c : plan.hull_classes) hull.push_back(encode_label(c));

  nlohmann::json doc = {
      {"initial", initial}, {"tasks", tasks}, {"hull", hull}, {"seed", plan.seed}};
  return doc.dump(indent) + "\n";
}

}  // namespace tca
