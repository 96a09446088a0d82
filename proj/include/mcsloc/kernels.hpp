#pragma once

// Data-parallel kernels behind the classifier. Every output element is
// produced by exactly one thread with a fixed inner summation order, so
// results are bitwise identical for any OpenMP thread count. The
// mcsloc::kernels::serial namespace keeps naive reference loops for the
// convolution kernels; tests compare the two and bench/ times them.
//
// Layout: batched activations are contiguous [batch][channel][time].

#include <cstddef>
#include <cstdint>

namespace mcsloc::kernels {

struct Conv1dShape {
  int batch;
  int in_channels;
  int out_channels;
  int length;
  int kernel;    // odd
  int dilation;  // >= 1
};

// out[b,co,t] = bias[co] + sum_ci sum_j w[co,ci,j] * in[b,ci,t + (j-(k-1)/2)*d]
// (zero outside [0,L)); "same" symmetric padding, output length == input length.
template <typename T>
void conv1d_same(const T* in, const T* w, const T* bias, T* out, const Conv1dShape& s);

// din[b,ci,t] = sum_co sum_j w[co,ci,j] * dout[b,co,t - (j-(k-1)/2)*d]
template <typename T>
void conv1d_grad_input(const T* dout, const T* w, T* din, const Conv1dShape& s);

// dw[co,ci,j] += sum_b sum_t dout[b,co,t] * in[b,ci,t + (j-(k-1)/2)*d]
// db[co]      += sum_b sum_t dout[b,co,t]
// Accumulates (caller zeroes). Summation order per element: batch-major,
// then an 8-lane interleaved sweep over t (fixed, thread-independent).
template <typename T>
void conv1d_grad_params(const T* dout, const T* in, T* dw, T* db, const Conv1dShape& s);

namespace serial {
template <typename T>
void conv1d_same(const T* in, const T* w, const T* bias, T* out, const Conv1dShape& s);
template <typename T>
void conv1d_grad_input(const T* dout, const T* w, T* din, const Conv1dShape& s);
template <typename T>
void conv1d_grad_params(const T* dout, const T* in, T* dw, T* db, const Conv1dShape& s);
}  // namespace serial

template <typename T>
void relu(const T* in, T* out, size_t n);

// din[i] = act[i] > 0 ? dout[i] : 0   (act is the forward ReLU output)
template <typename T>
void relu_grad(const T* act, const T* dout, T* din, size_t n);

template <typename T>
void add(const T* a, const T* b, T* out, size_t n);

// out[b,c] = mean_t in[b,c,t]
template <typename T>
void global_avg_pool(const T* in, T* out, int batch, int channels, int length);

template <typename T>
void global_avg_pool_grad(const T* dout, T* din, int batch, int channels, int length);

// out[b,o] = bias[o] + sum_i w[o,i] * in[b,i]
template <typename T>
void dense(const T* in, const T* w, const T* bias, T* out, int batch, int in_f, int out_f);

template <typename T>
void dense_grad_input(const T* dout, const T* w, T* din, int batch, int in_f, int out_f);

// accumulates into dw/db (caller zeroes)
template <typename T>
void dense_grad_params(const T* dout, const T* in, T* dw, T* db, int batch, int in_f, int out_f);

// numerically stable row-wise softmax, in-place allowed (in == out)
template <typename T>
void softmax_rows(const T* in, T* out, int rows, int cols);

}  // namespace mcsloc::kernels
