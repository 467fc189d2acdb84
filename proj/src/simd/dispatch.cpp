#include <atomic>
#include <stdexcept>

#include "momopt/simd/kernels.hpp"

namespace momopt::simd {

namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
};

constexpr KernelTable kScalar{Isa::Scalar, scalar::dot, scalar::axpy, scalar::max_abs,
                              scalar::sum_squares};
constexpr KernelTable kAvx2{Isa::Avx2, avx2::dot, avx2::axpy, avx2::max_abs, avx2::sum_squares};
constexpr KernelTable kNeon{Isa::Neon, neon::dot, neon::axpy, neon::max_abs, neon::sum_squares};

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Avx2: return &kAvx2;
    case Isa::Neon: return &kNeon;
    case Isa::Scalar: break;
  }
  return &kScalar;
}

const KernelTable* detect() {
  if (isa_available(Isa::Avx2)) return &kAvx2;
  if (isa_available(Isa::Neon)) return &kNeon;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_acquire)->isa; }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("instruction set not available");
  current().store(table_for(isa), std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) {
  return current().load(std::memory_order_relaxed)->dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  current().load(std::memory_order_relaxed)->axpy(alpha, x, y, n);
}
double max_abs(const double* x, std::size_t n) {
  return current().load(std::memory_order_relaxed)->max_abs(x, n);
}
double sum_squares(const double* x, std::size_t n) {
  return current().load(std::memory_order_relaxed)->sum_squares(x, n);
}

}  // namespace momopt::simd
