#pragma once

// Dense double-precision kernels used by the interior-point inner loops
// (Frobenius products for Newton systems, residual norms). Every kernel has a
// scalar reference version and vector versions; the widest one supported by
// the running CPU is picked once at startup.

#include <cstddef>
#include <span>

namespace momopt::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);
/// True when the kernels for `isa` are compiled in and the CPU can run them.
bool isa_available(Isa isa);
/// ISA currently used by the dispatching entry points.
Isa active_isa();
/// Pin the dispatch to `isa` (must be available). Used by equivalence tests.
void set_active_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace neon

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline double max_abs(std::span<const double> x) { return max_abs(x.data(), x.size()); }

}  // namespace momopt::simd
