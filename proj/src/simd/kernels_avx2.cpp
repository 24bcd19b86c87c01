#include <immintrin.h>

#include "qdot/simd/kernels.hpp"

// Compiled with -mavx2 -mfma; only reached after a CPUID check.
namespace qdot::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    acc0 = _mm256_fmadd_pd(p, _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

void dual_power_series(const double* x, const double* y, std::size_t n, const double* A, const double* B,
                       std::size_t nterms, double* sa, double* sb) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    __m256d pa = _mm256_setzero_pd();
    __m256d pb = _mm256_setzero_pd();
    for (std::size_t l = nterms; l-- > 0;) {
      pa = _mm256_fmadd_pd(pa, vx, _mm256_set1_pd(A[l]));
      pb = _mm256_fmadd_pd(pb, vy, _mm256_set1_pd(B[l]));
    }
    _mm256_storeu_pd(sa + i, pa);
    _mm256_storeu_pd(sb + i, pb);
  }
  for (; i < n; ++i) {
    double pa = 0.0, pb = 0.0;
    for (std::size_t l = nterms; l-- > 0;) {
      pa = pa * x[i] + A[l];
      pb = pb * y[i] + B[l];
    }
    sa[i] = pa;
    sb[i] = pb;
  }
}

void rotate(double* ph_re, double* ph_im, const double* rot_re, const double* rot_im, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pr = _mm256_loadu_pd(ph_re + i);
    const __m256d pi = _mm256_loadu_pd(ph_im + i);
    const __m256d rr = _mm256_loadu_pd(rot_re + i);
    const __m256d ri = _mm256_loadu_pd(rot_im + i);
    _mm256_storeu_pd(ph_re + i, _mm256_fmsub_pd(pr, rr, _mm256_mul_pd(pi, ri)));
    _mm256_storeu_pd(ph_im + i, _mm256_fmadd_pd(pr, ri, _mm256_mul_pd(pi, rr)));
  }
  for (; i < n; ++i) {
    const double re = ph_re[i] * rot_re[i] - ph_im[i] * rot_im[i];
    const double im = ph_re[i] * rot_im[i] + ph_im[i] * rot_re[i];
    ph_re[i] = re;
    ph_im[i] = im;
  }
}

ComplexSum star_reduce(const double* m, const double* ph_re, const double* ph_im, const double* c_re,
                       const double* c_im, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vm = _mm256_loadu_pd(m + i);
    const __m256d pr = _mm256_loadu_pd(ph_re + i);
    const __m256d pi = _mm256_loadu_pd(ph_im + i);
    const __m256d cr = _mm256_loadu_pd(c_re + i);
    const __m256d ci = _mm256_loadu_pd(c_im + i);
    const __m256d re = _mm256_fmadd_pd(pr, cr, _mm256_mul_pd(pi, ci));
    const __m256d im = _mm256_fmsub_pd(pr, ci, _mm256_mul_pd(pi, cr));
    acc_re = _mm256_fmadd_pd(vm, re, acc_re);
    acc_im = _mm256_fmadd_pd(vm, im, acc_im);
  }
  ComplexSum s{hsum(acc_re), hsum(acc_im)};
  for (; i < n; ++i) {
    s.re += m[i] * (ph_re[i] * c_re[i] + ph_im[i] * c_im[i]);
    s.im += m[i] * (ph_re[i] * c_im[i] - ph_im[i] * c_re[i]);
  }
  return s;
}

void star_scatter(const double* m, const double* ph_re, const double* ph_im, double z_re, double z_im,
                  double* out_re, double* out_im, std::size_t n) {
  const __m256d zr = _mm256_set1_pd(z_re);
  const __m256d zi = _mm256_set1_pd(z_im);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vm = _mm256_loadu_pd(m + i);
    const __m256d pr = _mm256_loadu_pd(ph_re + i);
    const __m256d pi = _mm256_loadu_pd(ph_im + i);
    const __m256d re = _mm256_fmsub_pd(pr, zr, _mm256_mul_pd(pi, zi));
    const __m256d im = _mm256_fmadd_pd(pr, zi, _mm256_mul_pd(pi, zr));
    _mm256_storeu_pd(out_re + i, _mm256_mul_pd(vm, re));
    _mm256_storeu_pd(out_im + i, _mm256_mul_pd(vm, im));
  }
  for (; i < n; ++i) {
    out_re[i] = m[i] * (ph_re[i] * z_re - ph_im[i] * z_im);
    out_im[i] = m[i] * (ph_re[i] * z_im + ph_im[i] * z_re);
  }
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{weighted_dot, axpy, dual_power_series, rotate, star_reduce, star_scatter};
  return &table;
}

}  // namespace qdot::simd
