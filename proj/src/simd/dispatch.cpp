#include <atomic>
#include <cstdlib>
#include <string>

#include "qdot/error.hpp"
#include "qdot/simd/kernels.hpp"

namespace qdot::simd {

#ifndef QDOT_HAVE_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

namespace {

Isa detect() noexcept {
  Isa best = cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  if (const char* env = std::getenv("QDOT_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && best == Isa::Avx2) return Isa::Avx2;
  }
  return best;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) noexcept {
  if (isa == Isa::Scalar) return true;
#if defined(QDOT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!cpu_supports(isa)) throw Error(ErrorCode::InvalidValue, "CPU cannot run " + std::string(to_string(isa)));
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
  if (!cpu_supports(isa)) throw Error(ErrorCode::InvalidValue, "CPU cannot run " + std::string(to_string(isa)));
  return isa == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

const KernelTable& kernels() noexcept {
  return active_isa() == Isa::Avx2 ? *avx2_kernels() : scalar_kernels();
}

}  // namespace qdot::simd
