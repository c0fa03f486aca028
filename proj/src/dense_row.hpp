#pragma once

#include <cstddef>

namespace dogfight::kernels::detail {

// y = bias + sum_k x[k] * w[k][:], summed in increasing k. Four rows of w are
// folded per pass to cut loads and stores of y; the summation order is unchanged.
inline void accumulate_row(const double* __restrict x, std::size_t in, const double* __restrict w,
                    const double* __restrict bias, std::size_t out, double* __restrict y) {
    for (std::size_t o = 0; o < out; ++o) y[o] = bias[o];
    std::size_t k = 0;
    for (; k + 4 <= in; k += 4) {
        const double x0 = x[k], x1 = x[k + 1], x2 = x[k + 2], x3 = x[k + 3];
        const double* w0 = w + k * out;
        const double* w1 = w0 + out;
        const double* w2 = w1 + out;
        const double* w3 = w2 + out;
        for (std::size_t o = 0; o < out; ++o) y[o] = (((y[o] + x0 * w0[o]) + x1 * w1[o]) + x2 * w2[o]) + x3 * w3[o];
    }
    for (; k < in; ++k) {
        const double xk = x[k];
        const double* wk = w + k * out;
        for (std::size_t o = 0; o < out; ++o) y[o] += xk * wk[o];
    }
}


}  // namespace dogfight::kernels::detail
