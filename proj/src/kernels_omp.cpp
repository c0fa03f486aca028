#include <cmath>
#include <cstdint>

#include "dense_row.hpp"
#include "dogfight/kernels.hpp"

namespace dogfight::kernels::omp {

namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = std::size_t{1} << 17;
}

void dense_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out,
                   std::span<double> y) {
    const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows > 1 && rows * in * out > kParallelWork)
    for (std::int64_t r = 0; r < n; ++r) {
        double* yr = y.data() + r * out;
        const double* xr = x.data() + r * in;
        detail::accumulate_row(xr, in, weight.data(), bias.data(), out, yr);
    }
}

void dense_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                          std::span<const double> weight, std::size_t in, std::span<double> dx) {
    const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows > 1 && rows * in * out > kParallelWork)
    for (std::int64_t r = 0; r < n; ++r) {
        const double* dyr = dy.data() + r * out;
        for (std::size_t k = 0; k < in; ++k) {
            const double* wk = weight.data() + k * out;
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) acc += dyr[o] * wk[o];
            dx[r * in + k] = acc;
        }
    }
}

void dense_backward_params(std::span<const double> x, std::span<const double> dy, std::size_t rows,
                           std::size_t in, std::size_t out, std::span<double> dweight,
                           std::span<double> dbias) {
    // Each thread owns whole rows of dweight; the batch is summed in order.
    const auto n_in = static_cast<std::int64_t>(in);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
    for (std::int64_t k = 0; k < n_in; ++k) {
        double* dwk = dweight.data() + k * out;
        for (std::size_t o = 0; o < out; ++o) dwk[o] = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double xk = x[r * in + k];
            const double* dyr = dy.data() + r * out;
            for (std::size_t o = 0; o < out; ++o) dwk[o] += xk * dyr[o];
        }
    }
    for (std::size_t o = 0; o < out; ++o) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rows; ++r) acc += dy[r * out + o];
        dbias[o] = acc;
    }
}

void tanh_inplace(std::span<double> v) {
    const auto n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static) if (v.size() > kParallelWork / 64)
    for (std::int64_t i = 0; i < n; ++i) v[i] = std::tanh(v[i]);
}

void tanh_backward(std::span<const double> y, std::span<double> dy) {
    const auto n = static_cast<std::int64_t>(dy.size());
#pragma omp parallel for schedule(static) if (dy.size() > kParallelWork / 64)
    for (std::int64_t i = 0; i < n; ++i) dy[i] *= 1.0 - y[i] * y[i];
}

}  // namespace dogfight::kernels::omp
