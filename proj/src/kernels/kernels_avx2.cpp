#if defined(__x86_64__)

#include <immintrin.h>

#include <cmath>

#include "opstat/kernels.hpp"

// AVX2 lane. Arithmetic mirrors the scalar lane operation for operation so
// that results are bit-identical (except gbm_terminal, which carries its own
// vectorized exp and is tolerance-tested).

namespace opstat::kern {
namespace {

// Complex product of the broadcast scalar (ar, ai) with two interleaved
// complex numbers in v = [br0, bi0, br1, bi1]:
//   re = ar*br - ai*bi, im = ar*bi + ai*br
// addsub applies (-,+,-,+), matching the scalar lane's (sub, add) pair.
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d v) {
  const __m256d t1 = _mm256_mul_pd(ar, v);
  const __m256d vswap = _mm256_permute_pd(v, 0b0101);
  const __m256d t2 = _mm256_mul_pd(ai, vswap);
  return _mm256_addsub_pd(t1, t2);
}

void cgemm_avx2(const double* a, const double* b, double* c, int n, int m,
                int k) {
  const int kpair = k & ~1;
  for (int i = 0; i < n; ++i) {
    const double* arow = a + 2 * static_cast<std::size_t>(i) * m;
    double* crow = c + 2 * static_cast<std::size_t>(i) * k;
    for (int j = 0; j < kpair; j += 2) {
      __m256d acc = _mm256_setzero_pd();
      for (int l = 0; l < m; ++l) {
        const __m256d ar = _mm256_set1_pd(arow[2 * l]);
        const __m256d ai = _mm256_set1_pd(arow[2 * l + 1]);
        const __m256d bv =
            _mm256_loadu_pd(b + 2 * (static_cast<std::size_t>(l) * k + j));
        acc = _mm256_add_pd(acc, cmul_broadcast(ar, ai, bv));
      }
      _mm256_storeu_pd(crow + 2 * j, acc);
    }
    for (int j = kpair; j < k; ++j) {
      double acc_re = 0.0, acc_im = 0.0;
      for (int l = 0; l < m; ++l) {
        const double ar = arow[2 * l], ai = arow[2 * l + 1];
        const double br = b[2 * (static_cast<std::size_t>(l) * k + j)];
        const double bi = b[2 * (static_cast<std::size_t>(l) * k + j) + 1];
        acc_re += ar * br - ai * bi;
        acc_im += ar * bi + ai * br;
      }
      crow[2 * j] = acc_re;
      crow[2 * j + 1] = acc_im;
    }
  }
}

double max_abs_diff_avx2(const double* a, const double* b, int n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  const int n2 = 2 * n;
  int i = 0;
  for (; i + 4 <= n2; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    vmax = _mm256_max_pd(vmax, _mm256_andnot_pd(signmask, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  for (; i < n2; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void em_step_avx2(double* x, const double* db, int n, double decay,
                  double sigma) {
  const __m256d vd = _mm256_set1_pd(decay);
  const __m256d vs = _mm256_set1_pd(sigma);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d f =
        _mm256_add_pd(vd, _mm256_mul_pd(vs, _mm256_loadu_pd(db + i)));
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  }
  for (; i < n; ++i) x[i] = x[i] * (decay + sigma * db[i]);
}

// exp() on 4 doubles: round-to-nearest power-of-two reduction with a split
// ln2, degree-14 Taylor polynomial on |r| <= ln2/2, 2^n scaling via the
// 2^52 bias trick. Accurate to a few ulp over the range used here.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  x = _mm256_min_pd(x, _mm256_set1_pd(708.0));
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, ln2_hi));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, ln2_lo));

  static const double kCoef[] = {
      1.1470745597729724714e-11,  // 1/14!
      1.6059043836821614599e-10,  // 1/13!
      2.0876756987868098979e-09,  // 1/12!
      2.5052108385441718775e-08,  // 1/11!
      2.7557319223985890653e-07,  // 1/10!
      2.7557319223985892511e-06,  // 1/9!
      2.4801587301587301566e-05,  // 1/8!
      1.9841269841269841253e-04,  // 1/7!
      1.3888888888888889419e-03,  // 1/6!
      8.3333333333333332177e-03,  // 1/5!
      4.1666666666666664354e-02,  // 1/4!
      1.6666666666666665741e-01,  // 1/3!
      5.0000000000000000000e-01,  // 1/2!
      1.0,
      1.0,
  };
  __m256d p = _mm256_set1_pd(kCoef[0]);
  for (std::size_t ci = 1; ci < sizeof(kCoef) / sizeof(kCoef[0]); ++ci)
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kCoef[ci]));

  const __m256d bias = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  const __m256i ni = _mm256_sub_epi64(
      _mm256_castpd_si256(_mm256_add_pd(n, bias)), _mm256_castpd_si256(bias));
  const __m256i expo =
      _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(expo));
}

void gbm_terminal_avx2(const double* b, double* out, int n, double x0,
                       double c, double sigma) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(sigma);
  const __m256d vx0 = _mm256_set1_pd(x0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg =
        _mm256_add_pd(vc, _mm256_mul_pd(vs, _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vx0, exp_pd(arg)));
  }
  for (; i < n; ++i) out[i] = x0 * std::exp(c + sigma * b[i]);
}

std::int64_t count_in_disk_avx2(const double* xs, const double* ys, int n,
                                double cx, double cy, double r2) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vr2 = _mm256_set1_pd(r2);
  std::int64_t count = 0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    count += __builtin_popcount(bits);
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx, dy = ys[i] - cy;
    if (dx * dx + dy * dy <= r2) ++count;
  }
  return count;
}

void disk_row_mask_avx2(const double* xs, int n, double y, double cx, double cy,
                        double r2, std::uint8_t* mask) {
  const double dy = y - cy;
  const __m256d vdy2 = _mm256_set1_pd(dy * dy);
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vr2 = _mm256_set1_pd(r2);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), vdy2);
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    mask[i] = (bits >> 0) & 1;
    mask[i + 1] = (bits >> 1) & 1;
    mask[i + 2] = (bits >> 2) & 1;
    mask[i + 3] = (bits >> 3) & 1;
  }
  const double dy2 = dy * dy;
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    mask[i] = (dx * dx + dy2 <= r2) ? 1 : 0;
  }
}

}  // namespace

namespace detail {
const Ops avx2_ops = {
    cgemm_avx2,        max_abs_diff_avx2,  em_step_avx2,
    gbm_terminal_avx2, count_in_disk_avx2, disk_row_mask_avx2,
};
}  // namespace detail

}  // namespace opstat::kern

#endif  // __x86_64__
