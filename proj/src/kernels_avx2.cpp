#include "simleo/kernels.hpp"

#include <stdexcept>

#if defined(SIMLEO_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace simleo::kernels::avx2 {

#if defined(SIMLEO_HAVE_AVX2)

namespace {

// Interleaved layout: one __m256d holds two complex doubles [re0, im0, re1, im1].

inline __m256d cmul_bcast(__m256d vr, __m256d vi, __m256d x)
{
    const __m256d xs = _mm256_permute_pd(x, 0b0101);
    return _mm256_fmaddsub_pd(vr, x, _mm256_mul_pd(vi, xs));
}

inline __m256d cmadd_bcast(__m256d vr, __m256d vi, __m256d x, __m256d acc)
{
    const __m256d xs = _mm256_permute_pd(x, 0b0101);
    return _mm256_addsub_pd(_mm256_fmadd_pd(vr, x, acc), _mm256_mul_pd(vi, xs));
}

inline __m128d cmadd_bcast128(__m128d vr, __m128d vi, __m128d x, __m128d acc)
{
    const __m128d xs = _mm_permute_pd(x, 0b01);
    return _mm_addsub_pd(_mm_fmadd_pd(vr, x, acc), _mm_mul_pd(vi, xs));
}

inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }
inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }

} // namespace

void cgemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n)
{
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = as_doubles(c + i * n);
        for (std::size_t j = 0; j < 2 * n; ++j) {
            crow[j] = 0.0;
        }
        for (std::size_t p = 0; p < k; ++p) {
            const cplx av = a[i * k + p];
            const __m256d vr = _mm256_set1_pd(av.real());
            const __m256d vi = _mm256_set1_pd(av.imag());
            const double* brow = as_doubles(b + p * n);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d c0 = _mm256_loadu_pd(crow + 2 * j);
                __m256d c1 = _mm256_loadu_pd(crow + 2 * j + 4);
                c0 = cmadd_bcast(vr, vi, _mm256_loadu_pd(brow + 2 * j), c0);
                c1 = cmadd_bcast(vr, vi, _mm256_loadu_pd(brow + 2 * j + 4), c1);
                _mm256_storeu_pd(crow + 2 * j, c0);
                _mm256_storeu_pd(crow + 2 * j + 4, c1);
            }
            for (; j + 2 <= n; j += 2) {
                __m256d c0 = _mm256_loadu_pd(crow + 2 * j);
                c0 = cmadd_bcast(vr, vi, _mm256_loadu_pd(brow + 2 * j), c0);
                _mm256_storeu_pd(crow + 2 * j, c0);
            }
            if (j < n) {
                __m128d c0 = _mm_loadu_pd(crow + 2 * j);
                c0 = cmadd_bcast128(_mm256_castpd256_pd128(vr), _mm256_castpd256_pd128(vi),
                                    _mm_loadu_pd(brow + 2 * j), c0);
                _mm_storeu_pd(crow + 2 * j, c0);
            }
        }
    }
}

void scale_rows(cplx* m, const cplx* d, std::size_t rows, std::size_t cols)
{
    for (std::size_t i = 0; i < rows; ++i) {
        const __m256d vr = _mm256_set1_pd(d[i].real());
        const __m256d vi = _mm256_set1_pd(d[i].imag());
        double* row = as_doubles(m + i * cols);
        std::size_t j = 0;
        for (; j + 2 <= cols; j += 2) {
            _mm256_storeu_pd(row + 2 * j, cmul_bcast(vr, vi, _mm256_loadu_pd(row + 2 * j)));
        }
        if (j < cols) {
            const __m128d x = _mm_loadu_pd(row + 2 * j);
            const __m128d xs = _mm_permute_pd(x, 0b01);
            const __m128d r = _mm_fmaddsub_pd(_mm256_castpd256_pd128(vr), x,
                                              _mm_mul_pd(_mm256_castpd256_pd128(vi), xs));
            _mm_storeu_pd(row + 2 * j, r);
        }
    }
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n)
{
    const double* xd = as_doubles(x);
    const double* yd = as_doubles(y);
    // acc_re lanes: [xr*yr, xi*yi, ...]; acc_im lanes: [xr*yi, xi*yr, ...]
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
    }
    alignas(32) double re[4];
    alignas(32) double im[4];
    _mm256_store_pd(re, acc_re);
    _mm256_store_pd(im, acc_im);
    double sum_re = (re[0] + re[1]) + (re[2] + re[3]);
    double sum_im = (im[0] - im[1]) + (im[2] - im[3]);
    if (i < n) {
        sum_re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        sum_im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {sum_re, sum_im};
}

#else

void cgemm(const cplx*, const cplx*, cplx*, std::size_t, std::size_t, std::size_t)
{
    throw std::runtime_error("avx2 kernels not compiled in");
}

void scale_rows(cplx*, const cplx*, std::size_t, std::size_t)
{
    throw std::runtime_error("avx2 kernels not compiled in");
}

cplx dotc(const cplx*, const cplx*, std::size_t)
{
    throw std::runtime_error("avx2 kernels not compiled in");
}

#endif

} // namespace simleo::kernels::avx2
