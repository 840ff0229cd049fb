#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "opstat/rng.hpp"

using namespace opstat;

TEST_CASE("Philox4x64-10 matches the numpy reference stream") {
  // numpy.random.Philox(key=K).random_raw(8)
  struct KnownAnswer {
    std::uint64_t key;
    std::array<std::uint64_t, 8> words;
  };
  const KnownAnswer vectors[] = {
      {0,
       {0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull, 0x1c8667a55d902e79ull,
        0x907d7a052fd5b4dcull, 0x809bf322883987c3ull, 0x471128b9e807f7ddull,
        0xf250ba0dbec065b7ull, 0xfc6ed66767a457bcull}},
      {42,
       {0xd1f8817d4d62880eull, 0x307266b65cc8797eull, 0xde1f04e7f084ed03ull,
        0x65034a8e78cd1e59ull, 0x5e3daa8961c3e3d3ull, 0x6f37dea4a04bd05cull,
        0x31d3a1ae26e190b9ull, 0x0fef7fae0ab2a01aull}},
      {0xDEADBEEFull,
       {0xa4e930dc738acaf1ull, 0xb1c7ecc6484e9cf0ull, 0x6b88a411909298aaull,
        0x66f3c896201f7262ull, 0x8217df84a2c417d2ull, 0x6545baef6469464dull,
        0xcb729362b22b9981ull, 0x8455360174d010a1ull}},
  };
  for (const auto& vec : vectors) {
    Philox gen(vec.key);
    for (const auto expected : vec.words) CHECK(gen.next_u64() == expected);
  }
}

TEST_CASE("streams with different ids are distinct, same ids identical") {
  Philox a(123, 0), b(123, 0), c(123, 1);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    all_equal &= (x == c.next_u64());
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform doubles live in their half-open intervals") {
  Philox gen(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = gen.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = gen.next_double_open();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("normal moments land inside wide Monte Carlo bands") {
  Philox gen(2024);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gen.next_normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential sampling has the right mean") {
  Philox gen(55);
  const double rate = 2.5;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += gen.next_exponential(rate);
  const double mean = sum / n;
  CHECK(std::fabs(mean - 1.0 / rate) < 4.0 / (rate * std::sqrt(static_cast<double>(n))));
}

TEST_CASE("categorical draws follow the cumulative weights") {
  Philox gen(7);
  const std::vector<double> cum{0.1, 0.1, 0.6, 1.0};  // p = .1, 0, .5, .4
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[gen.next_categorical(cum)];
  CHECK(counts[1] == 0);
  CHECK(std::fabs(counts[0] / double(n) - 0.1) < 0.01);
  CHECK(std::fabs(counts[2] / double(n) - 0.5) < 0.01);
  CHECK(std::fabs(counts[3] / double(n) - 0.4) < 0.01);
}
