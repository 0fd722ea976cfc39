#include "simleo/matrix.hpp"

#include "simleo/kernels.hpp"

#include <cmath>

namespace simleo {

CMatrix transpose(const CMatrix& m)
{
    CMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = m(r, c);
        }
    }
    return out;
}

CMatrix adjoint(const CMatrix& m)
{
    CMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = std::conj(m(r, c));
        }
    }
    return out;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimension mismatch");
    }
    CMatrix out(a.rows(), b.cols());
    kernels::cgemm(a.data(), b.data(), out.data(), a.rows(), a.cols(), b.cols());
    return out;
}

CMatrix scale_rows(const CMatrix& m, std::span<const cplx> d)
{
    if (d.size() != m.rows()) {
        throw std::invalid_argument("scale_rows: diagonal length mismatch");
    }
    CMatrix out = m;
    kernels::scale_rows(out.data(), d, out.rows(), out.cols());
    return out;
}

double frobenius_distance(const CMatrix& a, const CMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::norm(a.data()[i] - b.data()[i]);
    }
    return std::sqrt(acc);
}

double frobenius_norm(const CMatrix& a)
{
    double acc = 0.0;
    for (const auto& v : a.data()) {
        acc += std::norm(v);
    }
    return std::sqrt(acc);
}

cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y)
{
    return kernels::dotc(x, y);
}

double norm2(std::span<const cplx> x)
{
    double acc = 0.0;
    for (const auto& v : x) {
        acc += std::norm(v);
    }
    return std::sqrt(acc);
}

} // namespace simleo
