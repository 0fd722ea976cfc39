#include "simleo/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace simleo::kernels {

namespace {

Backend detect()
{
    if (const char* env = std::getenv("SIMLEO_KERNELS")) {
        const std::string_view want{env};
        if (want == "scalar") {
            return Backend::scalar;
        }
        if (want == "avx2" && avx2_available()) {
            return Backend::avx2;
        }
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current()
{
    static std::atomic<Backend> backend{detect()};
    return backend;
}

void check_len(std::size_t have, std::size_t need, const char* what)
{
    if (have < need) {
        throw std::invalid_argument(std::string("kernels: buffer too small for ") + what);
    }
}

} // namespace

std::string_view backend_name(Backend b)
{
    return b == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_available()
{
#if defined(SIMLEO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Backend active_backend()
{
    return current().load(std::memory_order_relaxed);
}

void force_backend(Backend b)
{
    if (b == Backend::avx2 && !avx2_available()) {
        throw std::runtime_error("avx2 backend requested but not available on this CPU/build");
    }
    current().store(b, std::memory_order_relaxed);
}

void cgemm(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> c,
           std::size_t m, std::size_t k, std::size_t n)
{
    check_len(a.size(), m * k, "a");
    check_len(b.size(), k * n, "b");
    check_len(c.size(), m * n, "c");
    if (active_backend() == Backend::avx2) {
        avx2::cgemm(a.data(), b.data(), c.data(), m, k, n);
    } else {
        scalar::cgemm(a.data(), b.data(), c.data(), m, k, n);
    }
}

void scale_rows(std::span<cplx> m, std::span<const cplx> d, std::size_t rows, std::size_t cols)
{
    check_len(m.size(), rows * cols, "m");
    check_len(d.size(), rows, "d");
    if (active_backend() == Backend::avx2) {
        avx2::scale_rows(m.data(), d.data(), rows, cols);
    } else {
        scalar::scale_rows(m.data(), d.data(), rows, cols);
    }
}

cplx dotc(std::span<const cplx> x, std::span<const cplx> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("kernels::dotc: length mismatch");
    }
    if (active_backend() == Backend::avx2) {
        return avx2::dotc(x.data(), y.data(), x.size());
    }
    return scalar::dotc(x.data(), y.data(), x.size());
}

} // namespace simleo::kernels
