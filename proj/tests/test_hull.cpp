#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tca/hull.hpp"
#include "tca/rng.hpp"

using tca::Centroid;
using tca::EmbeddedPoint;
using tca::Point2;

namespace {

std::set<std::pair<double, double>> hull_positions(const std::vector<Point2>& pts) {
  std::set<std::pair<double, double>> out;
  for (std::size_t idx : tca::quickhull(pts)) out.insert({pts[idx].x, pts[idx].y});
  return out;
}

std::vector<Point2> random_points(std::size_t n, tca::Rng& rng) {
  std::vector<Point2> pts(n);
  for (auto& p : pts) {
    p.x = rng.uniform01() * 10.0 - 5.0;
    p.y = rng.uniform01() * 10.0 - 5.0;
  }
  return pts;
}

}  // namespace

TEST_CASE("class_centroids") {
  std::vector<EmbeddedPoint> single = {{1.5, -2.0, "a"}, {0.0, 0.0, "b"}};
  std::vector<Centroid> cs = tca::class_centroids(single);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].class_label == "a");
  CHECK(cs[0].x == 1.5);
  CHECK(cs[0].y == -2.0);

  std::vector<EmbeddedPoint> pair = {{0, 0, "c"}, {2, 2, "c"}};
  cs = tca::class_centroids(pair);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].x == doctest::Approx(1.0));
  CHECK(cs[0].y == doctest::Approx(1.0));

  CHECK_THROWS_AS(tca::class_centroids({}), tca::Error);
}

TEST_CASE("class_centroids matches a direct summation oracle") {
  tca::Rng rng(42);
  std::vector<EmbeddedPoint> points;
  const std::size_t n_classes = 10;
  for (std::size_t n = 0; n < 1000; ++n) {
    EmbeddedPoint p;
    p.class_label = std::to_string(rng.uniform_below(n_classes));
    p.x = rng.normal();
    p.y = rng.normal();
    points.push_back(p);
  }
  std::vector<Centroid> cs = tca::class_centroids(points);
  REQUIRE(cs.size() == n_classes);

  for (const Centroid& c : cs) {
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (const auto& p : points)
      if (p.class_label == c.class_label) {
        sx += p.x;
        sy += p.y;
        ++count;
      }
    CHECK(c.x == doctest::Approx(sx / count).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(sy / count).epsilon(1e-12));
  }

  // Numeric labels sort numerically, not lexicographically.
  std::vector<EmbeddedPoint> numeric = {{0, 0, "10"}, {0, 0, "2"}, {0, 0, "1"}};
  std::vector<Centroid> ordered = tca::class_centroids(numeric);
  CHECK(ordered[0].class_label == "1");
  CHECK(ordered[1].class_label == "2");
  CHECK(ordered[2].class_label == "10");
}

TEST_CASE("quickhull on the unit square") {
  std::vector<Point2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::size_t> hull = tca::quickhull(square);
  REQUIRE(hull.size() == 4);
  CHECK(hull[0] == 0);  // lowest-(y, x) first
  // Counter-clockwise walk.
  CHECK(hull == std::vector<std::size_t>{0, 1, 2, 3});

  std::vector<Point2> with_center = square;
  with_center.push_back({0.5, 0.5});
  CHECK(tca::quickhull(with_center).size() == 4);
}

TEST_CASE("quickhull rejects degenerate input") {
  CHECK_THROWS_AS(tca::quickhull({{0, 0}, {1, 1}}), tca::Error);
  try {
    tca::quickhull({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    FAIL("expected DegenerateInput");
  } catch (const tca::Error& e) {
    CHECK(e.code() == tca::errc::degenerate_input);
  }
  // Duplicates of two distinct positions are still degenerate.
  CHECK_THROWS_AS(tca::quickhull({{0, 0}, {1, 1}, {0, 0}, {1, 1}}), tca::Error);
}

TEST_CASE("quickhull excludes collinear edge-interior points") {
  std::vector<Point2> pts = {{0, 0}, {2, 0}, {1, 0}, {1, 2}};  // (1,0) on the bottom edge
  std::vector<std::size_t> hull = tca::quickhull(pts);
  std::set<std::size_t> vertices(hull.begin(), hull.end());
  CHECK(vertices == std::set<std::size_t>{0, 1, 3});
}

TEST_CASE("quickhull matches the brute-force oracle on random sets") {
  tca::Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 5 + rng.uniform_below(56);
    std::vector<Point2> pts = random_points(n, rng);
    // Inject collinear triples and duplicates.
    if (n >= 3) {
      pts.push_back({(pts[0].x + pts[1].x) / 2.0, (pts[0].y + pts[1].y) / 2.0});
      pts.push_back(pts[2]);
    }
    CHECK(hull_positions(pts) == oracle::brute_force_hull_positions(pts));
  }
}

TEST_CASE("quickhull output is convex, contains every point, and ignores order") {
  tca::Rng rng(13);
  std::vector<Point2> pts = random_points(60, rng);
  std::vector<std::size_t> hull = tca::quickhull(pts);
  REQUIRE(hull.size() >= 3);

  // Convexity: consecutive CCW edges never turn clockwise.
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& a = pts[hull[i]];
    const Point2& b = pts[hull[(i + 1) % hull.size()]];
    const Point2& c = pts[hull[(i + 2) % hull.size()]];
    double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    CHECK(cross >= -1e-12);
  }

  // Containment: every input point lies on the inner side of every edge.
  for (const Point2& p : pts)
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point2& a = pts[hull[i]];
      const Point2& b = pts[hull[(i + 1) % hull.size()]];
      double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      CHECK(cross >= -1e-9);
    }

  // Permutation invariance as a vertex position set.
  std::vector<Point2> shuffled = pts;
  rng.shuffle(shuffled);
  CHECK(hull_positions(pts) == hull_positions(shuffled));
}

TEST_CASE("curate_tasks draws the initial task from the hull") {
  // Six hull classes and four interior ones.
  std::vector<Centroid> centroids;
  for (int i = 0; i < 6; ++i) {
    double angle = 2.0 * M_PI * i / 6.0;
    centroids.push_back({"hull" + std::to_string(i), 10.0 * std::cos(angle),
                         10.0 * std::sin(angle)});
  }
  for (int i = 0; i < 4; ++i)
    centroids.push_back({"inner" + std::to_string(i), 0.5 * i, 0.25 * i});

  tca::TaskPlan plan = tca::curate_tasks(centroids, 4, 3, 99);
  CHECK(plan.hull_classes.size() == 6);
  CHECK(plan.initial_classes.size() == 4);
  for (const auto& c : plan.initial_classes) {
    CHECK(std::count(plan.hull_classes.begin(), plan.hull_classes.end(), c) == 1);
    CHECK(c.rfind("hull", 0) == 0);
  }

  // 6 remaining classes over 3 tasks -> (2, 2, 2).
  REQUIRE(plan.later_tasks.size() == 3);
  for (const auto& task : plan.later_tasks) CHECK(task.size() == 2);

  // Identical seeds replay the exact same plan.
  tca::TaskPlan replay = tca::curate_tasks(centroids, 4, 3, 99);
  CHECK(replay.initial_classes == plan.initial_classes);
  CHECK(replay.later_tasks == plan.later_tasks);
  CHECK(tca::task_plan_to_json(replay) == tca::task_plan_to_json(plan));
}

TEST_CASE("curate_tasks takes all three corners of a triangle") {
  std::vector<Centroid> tri = {{"a", 0, 0}, {"b", 4, 0}, {"c", 0, 3}};
  tca::TaskPlan plan = tca::curate_tasks(tri, 3, 0, 1);
  CHECK(plan.initial_classes.size() == 3);
  CHECK(plan.later_tasks.empty());
}

TEST_CASE("curate_tasks error paths") {
  std::vector<Centroid> tri = {{"a", 0, 0}, {"b", 4, 0}, {"c", 0, 3}};
  try {
    tca::curate_tasks(tri, 4, 0, 1);
    FAIL("expected HullTooSmall");
  } catch (const tca::Error& e) {
    CHECK(e.code() == tca::errc::hull_too_small);
  }
  try {
    tca::curate_tasks(tri, 2, 5, 1);
    FAIL("expected TooManyTasks");
  } catch (const tca::Error& e) {
    CHECK(e.code() == tca::errc::too_many_tasks);
  }
}

TEST_CASE("task plans partition the classes with balanced sizes") {
  tca::Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n_classes = 10 + rng.uniform_below(31);
    std::vector<Centroid> centroids;
    for (std::size_t c = 0; c < n_classes; ++c)
      centroids.push_back({std::to_string(c), rng.normal() * 3.0, rng.normal() * 3.0});

    std::vector<Point2> positions;
    for (const auto& c : centroids) positions.push_back({c.x, c.y});
    std::size_t hull_size = tca::quickhull(positions).size();

    std::size_t num_initial = 1 + rng.uniform_below(hull_size);
    std::size_t remaining = n_classes - num_initial;
    std::size_t num_tasks = remaining == 0 ? 0 : 1 + rng.uniform_below(remaining);

    tca::TaskPlan plan =
        tca::curate_tasks(centroids, num_initial, num_tasks, 1000 + trial);

    std::set<std::string> seen(plan.initial_classes.begin(), plan.initial_classes.end());
    CHECK(seen.size() == plan.initial_classes.size());
    std::size_t largest = 0, smallest = n_classes;
    for (const auto& task : plan.later_tasks) {
      largest = std::max(largest, task.size());
      smallest = std::min(smallest, task.size());
      for (const auto& c : task) CHECK(seen.insert(c).second);  // disjoint
    }
    CHECK(seen.size() == n_classes);  // exhaustive
    if (!plan.later_tasks.empty()) CHECK(largest - smallest <= 1);
  }
}
