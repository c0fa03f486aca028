#include <cmath>

#include "dense_row.hpp"
#include "dogfight/kernels.hpp"

namespace dogfight::kernels::serial {

void dense_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out,
                   std::span<double> y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* yr = y.data() + r * out;
        const double* xr = x.data() + r * in;
        detail::accumulate_row(xr, in, weight.data(), bias.data(), out, yr);
    }
}

void dense_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                          std::span<const double> weight, std::size_t in, std::span<double> dx) {
    for (std::size_t r = 0; r < rows; ++r) {
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
    for (std::size_t k = 0; k < in; ++k) {
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
    for (double& e : v) e = std::tanh(e);
}

void tanh_backward(std::span<const double> y, std::span<double> dy) {
    for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= 1.0 - y[i] * y[i];
}

}  // namespace dogfight::kernels::serial
