#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "tactile_pack/rng.hpp"
#include "tactile_pack/vec2.hpp"

using tactile_pack::Rng;
using tactile_pack::Vec2;

TEST_CASE("rng streams are deterministic per seed") {
  Rng a(1234);
  Rng b(1234);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(1235);
  Rng d(1234);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    if (c.next_u64() != d.next_u64()) all_equal = false;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  Rng rng(77);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform respects bounds and degenerate ranges") {
  Rng rng(5150);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(-3.25, 9.5);
    CHECK(v >= -3.25);
    CHECK(v < 9.5);
  }
  for (int i = 0; i < 16; ++i) {
    CHECK(rng.uniform(4.0, 4.0) == 4.0);
  }
}

TEST_CASE("gaussian moments land near standard normal") {
  Rng rng(99);
  const int n = 200000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("mix_seed separates streams by salt") {
  const std::uint64_t base = 42;
  CHECK(tactile_pack::mix_seed(base, 1) != tactile_pack::mix_seed(base, 2));
  CHECK(tactile_pack::mix_seed(base, 1) == tactile_pack::mix_seed(base, 1));
  CHECK(tactile_pack::mix_seed(1, 7) != tactile_pack::mix_seed(2, 7));
}

TEST_CASE("vec2 rotation is counter-clockwise") {
  const Vec2 east{1.0, 0.0};
  const Vec2 north = tactile_pack::rotate(east, 90.0);
  CHECK(north.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(north.y == doctest::Approx(1.0).epsilon(1e-12));
  const Vec2 back = tactile_pack::rotate(north, -90.0);
  CHECK(back.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("vec2 norm and degree conversions") {
  CHECK(tactile_pack::norm(Vec2{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(tactile_pack::deg_to_rad(180.0) == doctest::Approx(3.14159265358979323846));
  CHECK(tactile_pack::rad_to_deg(tactile_pack::deg_to_rad(33.0)) ==
        doctest::Approx(33.0).epsilon(1e-12));
}
