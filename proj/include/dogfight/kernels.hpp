#pragma once

// Dense-layer kernels. `serial` is the reference implementation; `omp` is the
// OpenMP-parallel version used by the network. Both compute every output
// element with the same summation order, so their results are bit-identical.
//
// Layout: x is [rows][in], weight is [in][out] (transposed), y is [rows][out].

#include <cstddef>
#include <span>

namespace dogfight::kernels {

namespace serial {

/// y = x * weight + bias
void dense_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out,
                   std::span<double> y);

/// dx = dy * weight^T
void dense_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                          std::span<const double> weight, std::size_t in, std::span<double> dx);

/// dweight = x^T * dy, dbias = column sums of dy (both overwritten)
void dense_backward_params(std::span<const double> x, std::span<const double> dy, std::size_t rows,
                           std::size_t in, std::size_t out, std::span<double> dweight,
                           std::span<double> dbias);

void tanh_inplace(std::span<double> v);

/// dy *= 1 - y^2 where y = tanh(pre-activation)
void tanh_backward(std::span<const double> y, std::span<double> dy);

}  // namespace serial

namespace omp {

void dense_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                   std::span<const double> weight, std::span<const double> bias, std::size_t out,
                   std::span<double> y);
void dense_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                          std::span<const double> weight, std::size_t in, std::span<double> dx);
void dense_backward_params(std::span<const double> x, std::span<const double> dy, std::size_t rows,
                           std::size_t in, std::size_t out, std::span<double> dweight,
                           std::span<double> dbias);
void tanh_inplace(std::span<double> v);
void tanh_backward(std::span<const double> y, std::span<double> dy);

}  // namespace omp

}  // namespace dogfight::kernels
