#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace opstat::kern {

// Data-parallel inner loops used by the matrix layer, the SDE ensemble
// runner and the codec grid metrics. Each function has a scalar reference
// implementation and, on x86-64, an AVX2 variant selected at runtime.
//
// Dense complex data is row-major with interleaved (re, im) pairs -- the
// memory layout of std::complex<double>.
//
// Lane equivalence contract (enforced by tests/test_kernels.cpp):
//   * cgemm, max_abs_diff, em_step, count_in_disk, disk_row_mask perform
//     the same arithmetic in the same order in every lane and must agree
//     bit for bit (the build disables FMA contraction).
//   * gbm_terminal uses a vectorized exp() in the AVX2 lane and agrees
//     with the scalar lane to a few ulp.
struct Ops {
  // C (n x k) = A (n x m) * B (m x k), complex
  void (*cgemm)(const double* a, const double* b, double* c, int n, int m, int k);
  // max over n complex entries of |a_i - b_i| (max of |re diff|, |im diff|)
  double (*max_abs_diff)(const double* a, const double* b, int n);
  // One Euler-Maruyama step over a block of paths: x[i] *= decay + sigma*db[i]
  void (*em_step)(double* x, const double* db, int n, double decay, double sigma);
  // out[i] = x0 * exp(c + sigma * b[i])
  void (*gbm_terminal)(const double* b, double* out, int n, double x0, double c,
                       double sigma);
  // count of points with (xs[i]-cx)^2 + (ys[i]-cy)^2 <= r2
  std::int64_t (*count_in_disk)(const double* xs, const double* ys, int n,
                                double cx, double cy, double r2);
  // mask[i] = 1 iff (xs[i]-cx)^2 + (y-cy)^2 <= r2, for one grid row at height y
  void (*disk_row_mask)(const double* xs, int n, double y, double cx, double cy,
                        double r2, std::uint8_t* mask);
};

// Active dispatch table. The lane is chosen once at first use: AVX2 when the
// CPU supports it, unless overridden by set_lane() or the environment
// variable OPSTAT_KERNEL_LANE (values: "scalar", "avx2").
const Ops& ops();

std::string_view active_lane();
std::vector<std::string_view> available_lanes();

// Switch lanes explicitly (used by the equivalence tests). Returns false and
// leaves the active lane unchanged if the requested lane is unavailable.
bool set_lane(std::string_view name);

namespace detail {
extern const Ops scalar_ops;
#if defined(__x86_64__)
extern const Ops avx2_ops;
#endif
}  // namespace detail

}  // namespace opstat::kern
