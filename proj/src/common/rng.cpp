#include "opstat/rng.hpp"

#include <cmath>

#include "opstat/errors.hpp"

namespace opstat {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> round_once(
    const std::array<std::uint64_t, 4>& c,
    const std::array<std::uint64_t, 2>& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

void Philox::advance_block() {
  // The 256-bit counter is incremented before each block, matching numpy:
  // the first emitted block belongs to counter value 1.
  for (int i = 0; i < 4; ++i) {
    if (++ctr_[i] != 0) break;
  }
  std::array<std::uint64_t, 4> c = ctr_;
  std::array<std::uint64_t, 2> k = key_;
  for (int r = 0; r < 9; ++r) {
    c = round_once(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  block_ = round_once(c, k);
  idx_ = 0;
}

std::uint64_t Philox::next_u64() {
  if (idx_ >= 4) advance_block();
  return block_[idx_++];
}

double Philox::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_double_open();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double Philox::next_exponential(double rate) {
  if (!(rate > 0.0)) throw ValidationError("exponential rate must be > 0");
  return -std::log(next_double_open()) / rate;
}

std::size_t Philox::next_categorical(const std::vector<double>& cumulative) {
  if (cumulative.empty())
    throw ValidationError("categorical draw from empty weight table");
  const double u = next_double() * cumulative.back();
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (u < cumulative[mid])
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace opstat
