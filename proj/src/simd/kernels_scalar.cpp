#include "qdot/simd/kernels.hpp"

namespace qdot::simd {
namespace {

double weighted_dot(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void dual_power_series(const double* x, const double* y, std::size_t n, const double* A, const double* B,
                       std::size_t nterms, double* sa, double* sb) {
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    const double re = ph_re[i] * rot_re[i] - ph_im[i] * rot_im[i];
    const double im = ph_re[i] * rot_im[i] + ph_im[i] * rot_re[i];
    ph_re[i] = re;
    ph_im[i] = im;
  }
}

ComplexSum star_reduce(const double* m, const double* ph_re, const double* ph_im, const double* c_re,
                       const double* c_im, std::size_t n) {
  ComplexSum s;
  for (std::size_t i = 0; i < n; ++i) {
    s.re += m[i] * (ph_re[i] * c_re[i] + ph_im[i] * c_im[i]);
    s.im += m[i] * (ph_re[i] * c_im[i] - ph_im[i] * c_re[i]);
  }
  return s;
}

void star_scatter(const double* m, const double* ph_re, const double* ph_im, double z_re, double z_im,
                  double* out_re, double* out_im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out_re[i] = m[i] * (ph_re[i] * z_re - ph_im[i] * z_im);
    out_im[i] = m[i] * (ph_re[i] * z_im + ph_im[i] * z_re);
  }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{weighted_dot, axpy, dual_power_series, rotate, star_reduce, star_scatter};
  return table;
}

}  // namespace qdot::simd
