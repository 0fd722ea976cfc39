#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace simleo {

using cplx = std::complex<double>;

// Dense row-major matrix. Element (r, c) lives at data()[r * cols() + c].
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T{1};
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<T> col(std::size_t c) const
    {
        std::vector<T> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    void set_col(std::size_t c, std::span<const T> values)
    {
        if (values.size() != rows_) {
            throw std::invalid_argument("Matrix::set_col: length mismatch");
        }
        for (std::size_t r = 0; r < rows_; ++r) {
            (*this)(r, c) = values[r];
        }
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMatrix = Matrix<cplx>;
using RMatrix = Matrix<double>;
using CVector = std::vector<cplx>;

CMatrix transpose(const CMatrix& m);
CMatrix adjoint(const CMatrix& m);

// Dense product through the active kernel backend.
CMatrix matmul(const CMatrix& a, const CMatrix& b);

// diag(d) * m
CMatrix scale_rows(const CMatrix& m, std::span<const cplx> d);

// Frobenius norm of (a - b), and of a.
double frobenius_distance(const CMatrix& a, const CMatrix& b);
double frobenius_norm(const CMatrix& a);

// sum_i conj(x_i) y_i
cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y);

double norm2(std::span<const cplx> x);

} // namespace simleo
