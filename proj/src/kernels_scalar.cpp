#include "simleo/kernels.hpp"

namespace simleo::kernels::scalar {

void cgemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n)
{
    for (std::size_t i = 0; i < m; ++i) {
        cplx* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            crow[j] = cplx{};
        }
        for (std::size_t p = 0; p < k; ++p) {
            const double ar = a[i * k + p].real();
            const double ai = a[i * k + p].imag();
            const cplx* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double br = brow[j].real();
                const double bi = brow[j].imag();
                crow[j] += cplx{ar * br - ai * bi, ar * bi + ai * br};
            }
        }
    }
}

void scale_rows(cplx* m, const cplx* d, std::size_t rows, std::size_t cols)
{
    for (std::size_t i = 0; i < rows; ++i) {
        const double dr = d[i].real();
        const double di = d[i].imag();
        cplx* row = m + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            const double xr = row[j].real();
            const double xi = row[j].imag();
            row[j] = cplx{dr * xr - di * xi, dr * xi + di * xr};
        }
    }
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n)
{
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

} // namespace simleo::kernels::scalar
