#include "doctest.h"

#include "simleo/kernels.hpp"
#include "support.hpp"

#include <cmath>

using namespace simleo;
namespace k = simleo::kernels;

namespace {

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Textbook triple loop on std::complex, independent of both backends.
std::vector<cplx> naive_gemm(const std::vector<cplx>& a, const std::vector<cplx>& b, std::size_t m,
                             std::size_t kk, std::size_t n)
{
    std::vector<cplx> c(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{};
            for (std::size_t p = 0; p < kk; ++p) s += a[i * kk + p] * b[p * n + j];
            c[i * n + j] = s;
        }
    return c;
}

std::vector<cplx> random_vec(std::size_t n, Rng& rng)
{
    std::normal_distribution<double> nd;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {nd(rng), nd(rng)};
    return v;
}

} // namespace

TEST_CASE("scalar cgemm matches the naive product")
{
    Rng rng(7);
    for (auto [m, kk, n] : {std::tuple{1, 1, 1}, {3, 5, 7}, {8, 8, 8}, {4, 9, 2}}) {
        auto a = random_vec(m * kk, rng);
        auto b = random_vec(kk * n, rng);
        std::vector<cplx> c(m * n);
        k::scalar::cgemm(a.data(), b.data(), c.data(), m, kk, n);
        CHECK(max_diff(c, naive_gemm(a, b, m, kk, n)) < 1e-12);
    }
}

TEST_CASE("avx2 kernels agree with scalar reference")
{
    if (!k::avx2_available()) {
        MESSAGE("AVX2 not available, skipping equivalence");
        return;
    }
    Rng rng(11);
    std::uniform_int_distribution<std::size_t> dim(0, 19);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = dim(rng), kk = dim(rng), n = dim(rng);
        auto a = random_vec(m * kk, rng);
        auto b = random_vec(kk * n, rng);
        std::vector<cplx> cs(m * n), cv(m * n, cplx{99.0, 99.0});
        k::scalar::cgemm(a.data(), b.data(), cs.data(), m, kk, n);
        k::avx2::cgemm(a.data(), b.data(), cv.data(), m, kk, n);
        REQUIRE(max_diff(cs, cv) <= 1e-12 * (1.0 + static_cast<double>(kk)));

        auto d = random_vec(m, rng);
        auto ms = random_vec(m * n, rng);
        auto mv = ms;
        k::scalar::scale_rows(ms.data(), d.data(), m, n);
        k::avx2::scale_rows(mv.data(), d.data(), m, n);
        REQUIRE(max_diff(ms, mv) <= 1e-14);

        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);
        const cplx ds = k::scalar::dotc(x.data(), y.data(), n);
        const cplx dv = k::avx2::dotc(x.data(), y.data(), n);
        REQUIRE(std::abs(ds - dv) <= 1e-12 * (1.0 + static_cast<double>(n)));
    }
}

TEST_CASE("dotc conjugates its first argument")
{
    std::vector<cplx> x{{0.0, 1.0}, {2.0, 0.0}, {1.0, -1.0}};
    std::vector<cplx> y{{0.0, 1.0}, {1.0, 1.0}, {3.0, 0.0}};
    cplx expect{};
    for (std::size_t i = 0; i < x.size(); ++i) expect += std::conj(x[i]) * y[i];
    CHECK(std::abs(k::dotc(x, y) - expect) < 1e-14);
    CHECK(std::abs(k::scalar::dotc(x.data(), y.data(), x.size()) - expect) < 1e-14);
}

TEST_CASE("backend switching is observable and reversible")
{
    const auto original = k::active_backend();
    k::force_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    if (k::avx2_available()) {
        k::force_backend(k::Backend::avx2);
        CHECK(k::active_backend() == k::Backend::avx2);
    } else {
        CHECK_THROWS_AS(k::force_backend(k::Backend::avx2), std::runtime_error);
    }
    k::force_backend(original);
}

TEST_CASE("matmul through either backend gives the same product")
{
    Rng rng(3);
    const CMatrix a = testing::random_cmatrix(13, 17, rng);
    const CMatrix b = testing::random_cmatrix(17, 5, rng);
    const auto original = k::active_backend();
    k::force_backend(k::Backend::scalar);
    const CMatrix ref = matmul(a, b);
    if (k::avx2_available()) {
        k::force_backend(k::Backend::avx2);
        CHECK(frobenius_distance(matmul(a, b), ref) < 1e-12 * frobenius_norm(ref));
    }
    k::force_backend(original);
    CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
}
