#pragma once

// Complex double-precision inner loops used by the cascade and field
// propagation code. Every kernel has a portable scalar reference and an
// AVX2/FMA variant; the variant is chosen once at startup from CPUID and
// can be overridden with SIMLEO_KERNELS=scalar|avx2 or force_backend().

#include "simleo/matrix.hpp"

#include <cstddef>
#include <span>
#include <string_view>

namespace simleo::kernels {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b);

// True when the CPU and the build both provide AVX2 + FMA.
bool avx2_available();

Backend active_backend();

// Throws std::runtime_error when the requested backend is unavailable.
void force_backend(Backend b);

// c[m x n] = a[m x k] * b[k x n], all row-major, c overwritten.
void cgemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
           std::size_t m, std::size_t k, std::size_t n);

// m[i, :] *= d[i] for a rows x cols row-major matrix.
void scale_rows(std::span<cplx> m, std::span<const cplx> d, std::size_t rows, std::size_t cols);

// sum_i conj(x_i) * y_i
cplx dotc(std::span<const cplx> x, std::span<const cplx> y);

// Direct backend entry points, used by the equivalence tests.
namespace scalar {
void cgemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void scale_rows(cplx* m, const cplx* d, std::size_t rows, std::size_t cols);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
} // namespace scalar

namespace avx2 {
void cgemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void scale_rows(cplx* m, const cplx* d, std::size_t rows, std::size_t cols);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
} // namespace avx2

} // namespace simleo::kernels
