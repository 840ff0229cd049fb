#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "opstat/kernels.hpp"
#include "opstat/rng.hpp"

using namespace opstat;

namespace {

std::vector<double> random_doubles(std::size_t n, std::uint64_t seed,
                                   double scale = 1.0) {
  Philox gen(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * gen.next_normal();
  return v;
}

bool has_avx2() {
  const auto lanes = kern::available_lanes();
  return lanes.size() > 1;
}

struct LaneGuard {
  std::string saved;
  LaneGuard() : saved(kern::active_lane()) {}
  ~LaneGuard() { kern::set_lane(saved); }
};

}  // namespace

TEST_CASE("scalar cgemm matches a naive reference") {
  LaneGuard guard;
  REQUIRE(kern::set_lane("scalar"));
  const int n = 5, m = 4, k = 3;
  const auto a = random_doubles(2 * n * m, 11);
  const auto b = random_doubles(2 * m * k, 12);
  std::vector<double> c(2 * n * k, 0.0);
  kern::ops().cgemm(a.data(), b.data(), c.data(), n, m, k);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      std::complex<double> acc = 0.0;
      for (int l = 0; l < m; ++l) {
        const std::complex<double> av{a[2 * (i * m + l)], a[2 * (i * m + l) + 1]};
        const std::complex<double> bv{b[2 * (l * k + j)], b[2 * (l * k + j) + 1]};
        acc += av * bv;
      }
      CHECK(c[2 * (i * k + j)] == doctest::Approx(acc.real()).epsilon(1e-12));
      CHECK(c[2 * (i * k + j) + 1] == doctest::Approx(acc.imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("avx2 lane is bit-identical to scalar for exact kernels") {
  if (!has_avx2()) return;
  LaneGuard guard;

  // sizes straddling the vector width, including ragged tails
  for (const int n : {1, 2, 3, 4, 5, 7, 8, 16, 33}) {
    const auto a = random_doubles(2 * n * n, 100 + n);
    const auto b = random_doubles(2 * n * n, 200 + n);

    REQUIRE(kern::set_lane("scalar"));
    std::vector<double> c_ref(2 * n * n);
    kern::ops().cgemm(a.data(), b.data(), c_ref.data(), n, n, n);
    const double maxdiff_ref = kern::ops().max_abs_diff(a.data(), b.data(), n * n);

    REQUIRE(kern::set_lane("avx2"));
    std::vector<double> c_avx(2 * n * n);
    kern::ops().cgemm(a.data(), b.data(), c_avx.data(), n, n, n);
    const double maxdiff_avx = kern::ops().max_abs_diff(a.data(), b.data(), n * n);

    for (std::size_t i = 0; i < c_ref.size(); ++i) CHECK(c_ref[i] == c_avx[i]);
    CHECK(maxdiff_ref == maxdiff_avx);
  }
}

TEST_CASE("em_step lanes agree bit for bit") {
  if (!has_avx2()) return;
  LaneGuard guard;
  for (const int n : {1, 4, 5, 257}) {
    const auto db = random_doubles(n, 300 + n, 0.1);
    std::vector<double> xs(n, 1.0), xa(n, 1.0);

    REQUIRE(kern::set_lane("scalar"));
    for (int rep = 0; rep < 3; ++rep)
      kern::ops().em_step(xs.data(), db.data(), n, 0.99, 0.5);
    REQUIRE(kern::set_lane("avx2"));
    for (int rep = 0; rep < 3; ++rep)
      kern::ops().em_step(xa.data(), db.data(), n, 0.99, 0.5);
    for (int i = 0; i < n; ++i) CHECK(xs[i] == xa[i]);
  }
}

TEST_CASE("disk counting lanes agree bit for bit") {
  if (!has_avx2()) return;
  LaneGuard guard;
  const int n = 1003;
  Philox gen(42);
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = gen.next_double();
    ys[i] = gen.next_double();
  }
  std::vector<std::uint8_t> ms(n), ma(n);

  REQUIRE(kern::set_lane("scalar"));
  const auto count_s = kern::ops().count_in_disk(xs.data(), ys.data(), n, 0.5, 0.5, 0.0625);
  kern::ops().disk_row_mask(xs.data(), n, 0.4, 0.5, 0.5, 0.0625, ms.data());
  REQUIRE(kern::set_lane("avx2"));
  const auto count_a = kern::ops().count_in_disk(xs.data(), ys.data(), n, 0.5, 0.5, 0.0625);
  kern::ops().disk_row_mask(xs.data(), n, 0.4, 0.5, 0.5, 0.0625, ma.data());

  CHECK(count_s == count_a);
  CHECK(count_s > 0);
  for (int i = 0; i < n; ++i) CHECK(ms[i] == ma[i]);
}

TEST_CASE("gbm_terminal avx2 exp stays within a few ulp of libm") {
  if (!has_avx2()) return;
  LaneGuard guard;
  const int n = 4001;
  const auto b = random_doubles(n, 77, 2.0);
  std::vector<double> ref(n), alt(n);

  REQUIRE(kern::set_lane("scalar"));
  kern::ops().gbm_terminal(b.data(), ref.data(), n, 1.3, -0.7, 0.9);
  REQUIRE(kern::set_lane("avx2"));
  kern::ops().gbm_terminal(b.data(), alt.data(), n, 1.3, -0.7, 0.9);

  for (int i = 0; i < n; ++i) {
    CHECK(std::fabs(alt[i] - ref[i]) <= 5e-15 * std::fabs(ref[i]));
  }
}
