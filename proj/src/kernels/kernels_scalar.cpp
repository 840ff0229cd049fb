#include "opstat/kernels.hpp"

#include <cmath>

// Reference lane. Every operation here fixes the arithmetic (order of
// products and sums) that the SIMD lanes must reproduce.

namespace opstat::kern {
namespace {

void cgemm_scalar(const double* a, const double* b, double* c, int n, int m,
                  int k) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      double acc_re = 0.0, acc_im = 0.0;
      const double* arow = a + 2 * static_cast<std::size_t>(i) * m;
      for (int l = 0; l < m; ++l) {
        const double ar = arow[2 * l], ai = arow[2 * l + 1];
        const double br = b[2 * (static_cast<std::size_t>(l) * k + j)];
        const double bi = b[2 * (static_cast<std::size_t>(l) * k + j) + 1];
        acc_re += ar * br - ai * bi;
        acc_im += ar * bi + ai * br;
      }
      c[2 * (static_cast<std::size_t>(i) * k + j)] = acc_re;
      c[2 * (static_cast<std::size_t>(i) * k + j) + 1] = acc_im;
    }
  }
}

double max_abs_diff_scalar(const double* a, const double* b, int n) {
  double m = 0.0;
  for (int i = 0; i < 2 * n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void em_step_scalar(double* x, const double* db, int n, double decay,
                    double sigma) {
  for (int i = 0; i < n; ++i) x[i] = x[i] * (decay + sigma * db[i]);
}

void gbm_terminal_scalar(const double* b, double* out, int n, double x0,
                         double c, double sigma) {
  for (int i = 0; i < n; ++i) out[i] = x0 * std::exp(c + sigma * b[i]);
}

std::int64_t count_in_disk_scalar(const double* xs, const double* ys, int n,
                                  double cx, double cy, double r2) {
  std::int64_t count = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = xs[i] - cx, dy = ys[i] - cy;
    if (dx * dx + dy * dy <= r2) ++count;
  }
  return count;
}

void disk_row_mask_scalar(const double* xs, int n, double y, double cx,
                          double cy, double r2, std::uint8_t* mask) {
  const double dy = y - cy, dy2 = dy * dy;
  for (int i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    mask[i] = (dx * dx + dy2 <= r2) ? 1 : 0;
  }
}

}  // namespace

namespace detail {
const Ops scalar_ops = {
    cgemm_scalar,        max_abs_diff_scalar,  em_step_scalar,
    gbm_terminal_scalar, count_in_disk_scalar, disk_row_mask_scalar,
};
}  // namespace detail

}  // namespace opstat::kern
