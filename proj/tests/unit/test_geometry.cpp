#include <doctest.h>

#include <random>

#include "explorer/error.hpp"
#include "explorer/geometry.hpp"
#include "oracles.hpp"

using namespace explorer;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

std::vector<Vector> unit_square() { return {v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}; }

}  // namespace

TEST_CASE("box bound") {
  const std::vector<Vector> pts{v2(0, 0), v2(1, 2)};
  const BoxBound b = box_bound(pts, 0.0);
  CHECK(b.axes[0].low == 0);
  CHECK(b.axes[0].high == 1);
  CHECK(b.axes[1].high == 2);
  CHECK_FALSE(b.degenerate());

  const BoxBound single = box_bound(std::vector<Vector>{v2(3, 4)}, 0.0);
  CHECK(single.degenerate());

  const BoxBound inflated = box_bound(std::vector<Vector>{v2(0, 0), v2(10, 10)}, 0.1);
  CHECK(inflated.axes[0].low == doctest::Approx(-1));
  CHECK(inflated.axes[1].high == doctest::Approx(11));

  CHECK_THROWS_AS(box_bound(std::vector<Vector>{}, 0.0), Error);
}

TEST_CASE("unit square region") {
  const ConvexRegion r(unit_square());
  CHECK_FALSE(r.degenerate());
  CHECK(r.contains(v2(0.5, 0.5), 1e-9));
  CHECK_FALSE(r.contains(v2(2, 2), 1e-9));
  const double eps = 1e-3;
  CHECK(r.contains(v2(1 + eps / 2, 0.5), eps));
  CHECK_FALSE(r.contains(v2(1 + 2 * eps, 0.5), eps));
  CHECK(r.distance(v2(2, 2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.distance(v2(1 + eps / 2, 0.5)) == doctest::Approx(eps / 2).epsilon(1e-9));
  CHECK_THROWS_AS(r.contains((Vector(3) << 0, 0, 0).finished(), 0.0), Error);
}

TEST_CASE("distance matches a barycentric grid search on a triangle") {
  Matrix V(2, 3);
  V << 0, 4, 1,  //
      0, 0, 3;
  const Vector p = v2(4, 3);
  double best = 1e300;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double a = double(i) / n, b = double(j) / n, c = 1 - a - b;
      best = std::min(best, (a * V.col(0) + b * V.col(1) + c * V.col(2) - p).norm());
    }
  }
  CHECK(distance_to_hull(V, p) == doctest::Approx(best).epsilon(1e-3));
  CHECK(distance_to_hull(V, p) <= best + 1e-12);
}

TEST_CASE("two separated blobs give two regions, midpoint in neither") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<Vector> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(v2(n(rng), n(rng)));
    b.push_back(v2(10 + n(rng), n(rng)));
  }
  const auto regions = build_regions(std::vector<std::vector<Vector>>{a, b});
  REQUIRE(regions.size() == 2);
  const Vector mid = v2(5, 0);
  for (const auto& r : regions) CHECK_FALSE(r.contains(mid, 1e-6));
  Matrix Va(2, 30), Vb(2, 30);
  for (int i = 0; i < 30; ++i) {
    Va.col(i) = a[i];
    Vb.col(i) = b[i];
  }
  CHECK_FALSE(testing::lp_in_hull(Va, mid));
  CHECK_FALSE(testing::lp_in_hull(Vb, mid));
}

TEST_CASE("collinear cluster is a degenerate segment") {
  const ConvexRegion r(std::vector<Vector>{v2(0, 0), v2(1, 1), v2(2, 2), v2(3, 3)});
  CHECK(r.degenerate());
  CHECK_FALSE(r.point_set());
  CHECK(r.contains(v2(1.5, 1.5), 1e-9));
  CHECK_FALSE(r.contains(v2(1.5, 1.0), 1e-3));
}

TEST_CASE("clusters below dim + 1 points contain only their points") {
  const ConvexRegion r(std::vector<Vector>{v2(0, 0), v2(2, 0)});
  CHECK(r.point_set());
  CHECK(r.contains(v2(0, 0), 1e-9));
  CHECK(r.contains(v2(2, 1e-10), 1e-9));
  CHECK_FALSE(r.contains(v2(1, 0), 1e-9));
}

TEST_CASE("every generator is inside its own region") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int d : {2, 3, 5}) {
    std::vector<Vector> pts;
    for (int i = 0; i < 40; ++i) {
      Vector p(d);
      for (int k = 0; k < d; ++k) p[k] = n(rng);
      pts.push_back(p);
    }
    const ConvexRegion r(pts);
    for (const auto& p : pts) CHECK(r.contains(p, 1e-9));
  }
}

TEST_CASE("farthest-point thinning keeps at most the limit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> pts;
  for (int i = 0; i < 1500; ++i) pts.push_back(v2(u(rng), u(rng)));
  const ConvexRegion r(pts);
  CHECK(r.generator_count() <= kMaxRegionGenerators);
  const auto idx = farthest_point_subsample(pts, 10);
  CHECK(idx.size() == 10);
}

TEST_CASE("union of regions is smaller than the box (Monte Carlo)") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<Vector>> clusters(3);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 25; ++i) clusters[c].push_back(v2(6.0 * c + n(rng), 3.0 * (c % 2) + n(rng)));
  }
  std::vector<Vector> all;
  for (const auto& c : clusters) all.insert(all.end(), c.begin(), c.end());
  const BoxBound box = box_bound(all, kDefaultBoxMargin);
  const auto regions = build_regions(clusters);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside = 0;
  const int samples = 4000;
  for (int s = 0; s < samples; ++s) {
    const Vector p = v2(box.axes[0].low + u(rng) * box.axes[0].width(), box.axes[1].low + u(rng) * box.axes[1].width());
    for (const auto& r : regions) {
      if (r.contains(p, 0.0)) {
        ++inside;
        break;
      }
    }
  }
  CHECK(inside < samples);
  CHECK(inside > 0);
}

TEST_CASE("regions CSV lists generators per cluster") {
  const auto regions = build_regions(std::vector<std::vector<Vector>>{unit_square()});
  const std::string csv = regions_csv(regions);
  CHECK(csv.rfind("cluster,c0,c1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
