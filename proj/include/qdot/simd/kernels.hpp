#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by assembly, the interaction kernel and the
// time integrator. Each kernel has a scalar reference implementation and an
// AVX2/FMA variant; the variant is picked once at runtime from CPUID and can
// be pinned with QDOT_SIMD=scalar|avx2 or set_isa().
namespace qdot::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

struct ComplexSum {
  double re = 0.0;
  double im = 0.0;
};

struct KernelTable {
  /// sum_i w[i] x[i] y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y, std::size_t n);
  /// out[i] = y[i] + a x[i]; out may alias y
  void (*axpy)(double a, const double* x, const double* y, double* out, std::size_t n);
  /// Horner sums sa[i] = sum_l A[l] x[i]^l and sb[i] = sum_l B[l] y[i]^l, l < nterms
  void (*dual_power_series)(const double* x, const double* y, std::size_t n, const double* A, const double* B,
                            std::size_t nterms, double* sa, double* sb);
  /// (ph_re + i ph_im)[i] *= (rot_re + i rot_im)[i]
  void (*rotate)(double* ph_re, double* ph_im, const double* rot_re, const double* rot_im, std::size_t n);
  /// sum_i m[i] conj(ph[i]) c[i]
  ComplexSum (*star_reduce)(const double* m, const double* ph_re, const double* ph_im, const double* c_re,
                            const double* c_im, std::size_t n);
  /// out[i] = m[i] ph[i] z
  void (*star_scatter)(const double* m, const double* ph_re, const double* ph_im, double z_re, double z_im,
                       double* out_re, double* out_im, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the binary was built without AVX2 support.
const KernelTable* avx2_kernels() noexcept;

bool cpu_supports(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Throws qdot::Error(InvalidValue) when the CPU cannot run `isa`.
void set_isa(Isa isa);
const KernelTable& kernels() noexcept;
const KernelTable& kernels(Isa isa);

}  // namespace qdot::simd
