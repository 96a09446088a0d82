#include "mcsloc/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mcsloc::kernels {

namespace {

template <typename T>
inline void conv_row_saxpy(const T* in, const T* wrow, T bias_v, T* o, int Cin, int L, int K,
                           int d) {
  const int c = (K - 1) / 2;
  for (int t = 0; t < L; ++t) o[t] = bias_v;
  for (int ci = 0; ci < Cin; ++ci) {
    const T* x = in + static_cast<size_t>(ci) * L;
    for (int j = 0; j < K; ++j) {
      const T wv = wrow[ci * K + j];
      const int off = (j - c) * d;
      const int t0 = off < 0 ? -off : 0;
      const int t1 = off > 0 ? L - off : L;
      const T* xs = x + off;
      for (int t = t0; t < t1; ++t) o[t] += wv * xs[t];
    }
  }
}

// dot product with 8 interleaved partial sums; the lane layout is part of
// the kernel contract (fixed order regardless of threading).
template <typename T>
inline T dot_lanes8(const T* __restrict a, const T* __restrict b, int n) {
  T acc[8] = {};
  int t = 0;
  for (; t + 8 <= n; t += 8) {
#pragma omp simd
    for (int u = 0; u < 8; ++u) acc[u] += a[t + u] * b[t + u];
  }
  T tail = T(0);
  for (; t < n; ++t) tail += a[t] * b[t];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <typename T>
inline T sum_lanes8(const T* __restrict a, int n) {
  T acc[8] = {};
  int t = 0;
  for (; t + 8 <= n; t += 8) {
#pragma omp simd
    for (int u = 0; u < 8; ++u) acc[u] += a[t + u];
  }
  T tail = T(0);
  for (; t < n; ++t) tail += a[t];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

}  // namespace

template <typename T>
void conv1d_same(const T* in, const T* w, const T* bias, T* out, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int co = 0; co < Cout; ++co) {
      conv_row_saxpy(in + static_cast<size_t>(b) * Cin * L,
                     w + static_cast<size_t>(co) * Cin * s.kernel, bias[co],
                     out + (static_cast<size_t>(b) * Cout + co) * L, Cin, L, s.kernel, s.dilation);
    }
  }
}

template <typename T>
void conv1d_grad_input(const T* dout, const T* w, T* din, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
  const int K = s.kernel, d = s.dilation, c = (K - 1) / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int ci = 0; ci < Cin; ++ci) {
      T* o = din + (static_cast<size_t>(b) * Cin + ci) * L;
      for (int t = 0; t < L; ++t) o[t] = T(0);
      for (int co = 0; co < Cout; ++co) {
        const T* g = dout + (static_cast<size_t>(b) * Cout + co) * L;
        for (int j = 0; j < K; ++j) {
          const T wv = w[(static_cast<size_t>(co) * Cin + ci) * K + j];
          const int off = (c - j) * d;  // din[t] += w * dout[t + (j-c)*d] reversed
          const int t0 = off < 0 ? -off : 0;
          const int t1 = off > 0 ? L - off : L;
          const T* gs = g + off;
          for (int t = t0; t < t1; ++t) o[t] += wv * gs[t];
        }
      }
    }
  }
}

// Two output channels share every input load; all taps are fused into one
// sweep over the interior (where every tap is in range). Edge ranges are
// finished per tap with the 8-lane dot. K is capped by MaxK for the
// register accumulators; larger kernels take the per-tap fallback.
template <typename T>
void conv1d_grad_params(const T* dout, const T* in, T* dw, T* db, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
  const int K = s.kernel, d = s.dilation, c = (K - 1) / 2;
  constexpr int MaxK = 9;
  const int lo = c * d;
  const int hi = L - c * d;
  const bool blocked = K <= MaxK && Cout % 2 == 0 && hi - lo >= 16;
  if (blocked) {
    const int npairs = Cout / 2;
#pragma omp parallel for collapse(2) schedule(static)
    for (int p = 0; p < npairs; ++p) {
      for (int ci = 0; ci < Cin; ++ci) {
        const int co = 2 * p;
        T lanes[2][MaxK][8] = {};
        T edge[2][MaxK] = {};
        for (int b = 0; b < B; ++b) {
          const T* g0 = dout + (static_cast<size_t>(b) * Cout + co) * L;
          const T* g1 = dout + (static_cast<size_t>(b) * Cout + co + 1) * L;
          const T* x = in + (static_cast<size_t>(b) * Cin + ci) * L;
          int t = lo;
          for (; t + 8 <= hi; t += 8) {
            for (int j = 0; j < K; ++j) {
              const T* xs = x + t + (j - c) * d;
#pragma omp simd
              for (int u = 0; u < 8; ++u) {
                lanes[0][j][u] += g0[t + u] * xs[u];
                lanes[1][j][u] += g1[t + u] * xs[u];
              }
            }
          }
          for (int j = 0; j < K; ++j) {
            const int off = (j - c) * d;
            const int t0 = off < 0 ? -off : 0;
            const int t1 = off > 0 ? L - off : L;
            // leading edge, interleave remainder, trailing edge
            edge[0][j] += dot_lanes8(g0 + t0, x + t0 + off, lo - t0);
            edge[1][j] += dot_lanes8(g1 + t0, x + t0 + off, lo - t0);
            edge[0][j] += dot_lanes8(g0 + t, x + t + off, t1 - t);
            edge[1][j] += dot_lanes8(g1 + t, x + t + off, t1 - t);
          }
        }
        for (int half = 0; half < 2; ++half) {
          T* dwrow = dw + (static_cast<size_t>(co + half) * Cin + ci) * K;
          for (int j = 0; j < K; ++j) {
            const T* a = lanes[half][j];
            dwrow[j] += ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7])) +
                        edge[half][j];
          }
        }
      }
    }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (int co = 0; co < Cout; ++co) {
      for (int ci = 0; ci < Cin; ++ci) {
        T* dwrow = dw + (static_cast<size_t>(co) * Cin + ci) * K;
        for (int j = 0; j < K; ++j) {
          const int off = (j - c) * d;
          const int t0 = off < 0 ? -off : 0;
          const int t1 = off > 0 ? L - off : L;
          T acc = T(0);
          for (int b = 0; b < B; ++b) {
            const T* g = dout + (static_cast<size_t>(b) * Cout + co) * L;
            const T* x = in + (static_cast<size_t>(b) * Cin + ci) * L;
            acc += dot_lanes8(g + t0, x + t0 + off, t1 - t0);
          }
          dwrow[j] += acc;
        }
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (int co = 0; co < Cout; ++co) {
    T acc = T(0);
    for (int b = 0; b < B; ++b)
      acc += sum_lanes8(dout + (static_cast<size_t>(b) * Cout + co) * L, L);
    db[co] += acc;
  }
}

namespace serial {

template <typename T>
void conv1d_same(const T* in, const T* w, const T* bias, T* out, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
  const int K = s.kernel, d = s.dilation, c = (K - 1) / 2;
  for (int b = 0; b < B; ++b)
    for (int co = 0; co < Cout; ++co)
      for (int t = 0; t < L; ++t) {
        T acc = bias[co];
        for (int ci = 0; ci < Cin; ++ci)
          for (int j = 0; j < K; ++j) {
            const int tt = t + (j - c) * d;
            if (tt >= 0 && tt < L)
              acc += w[(static_cast<size_t>(co) * Cin + ci) * K + j] *
                     in[(static_cast<size_t>(b) * Cin + ci) * L + tt];
          }
        out[(static_cast<size_t>(b) * Cout + co) * L + t] = acc;
      }
}

template <typename T>
void conv1d_grad_input(const T* dout, const T* w, T* din, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
  const int K = s.kernel, d = s.dilation, c = (K - 1) / 2;
  for (int b = 0; b < B; ++b)
    for (int ci = 0; ci < Cin; ++ci)
      for (int t = 0; t < L; ++t) {
        T acc = T(0);
        for (int co = 0; co < Cout; ++co)
          for (int j = 0; j < K; ++j) {
            const int tt = t - (j - c) * d;
            if (tt >= 0 && tt < L)
              acc += w[(static_cast<size_t>(co) * Cin + ci) * K + j] *
                     dout[(static_cast<size_t>(b) * Cout + co) * L + tt];
          }
        din[(static_cast<size_t>(b) * Cin + ci) * L + t] = acc;
      }
}

template <typename T>
void conv1d_grad_params(const T* dout, const T* in, T* dw, T* db, const Conv1dShape& s) {
  const int B = s.batch, Cin = s.in_channels, Cout = s.out_channels, L = s.length;
  const int K = s.kernel, d = s.dilation, c = (K - 1) / 2;
  for (int co = 0; co < Cout; ++co) {
    for (int ci = 0; ci < Cin; ++ci)
      for (int j = 0; j < K; ++j) {
        T acc = T(0);
        for (int b = 0; b < B; ++b)
          for (int t = 0; t < L; ++t) {
            const int tt = t + (j - c) * d;
            if (tt >= 0 && tt < L)
              acc += dout[(static_cast<size_t>(b) * Cout + co) * L + t] *
                     in[(static_cast<size_t>(b) * Cin + ci) * L + tt];
          }
        dw[(static_cast<size_t>(co) * Cin + ci) * K + j] += acc;
      }
    T acc = T(0);
    for (int b = 0; b < B; ++b)
      for (int t = 0; t < L; ++t) acc += dout[(static_cast<size_t>(b) * Cout + co) * L + t];
    db[co] += acc;
  }
}

}  // namespace serial

template <typename T>
void relu(const T* in, T* out, size_t n) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i)
    out[i] = in[i] > T(0) ? in[i] : T(0);
}

template <typename T>
void relu_grad(const T* act, const T* dout, T* din, size_t n) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i)
    din[i] = act[i] > T(0) ? dout[i] : T(0);
}

template <typename T>
void add(const T* a, const T* b, T* out, size_t n) {
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i) out[i] = a[i] + b[i];
}

template <typename T>
void global_avg_pool(const T* in, T* out, int batch, int channels, int length) {
  const T inv = T(1) / static_cast<T>(length);
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c)
      out[static_cast<size_t>(b) * channels + c] =
          sum_lanes8(in + (static_cast<size_t>(b) * channels + c) * length, length) * inv;
}

template <typename T>
void global_avg_pool_grad(const T* dout, T* din, int batch, int channels, int length) {
  const T inv = T(1) / static_cast<T>(length);
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b)
    for (int c = 0; c < channels; ++c) {
      const T g = dout[static_cast<size_t>(b) * channels + c] * inv;
      T* o = din + (static_cast<size_t>(b) * channels + c) * length;
      for (int t = 0; t < length; ++t) o[t] = g;
    }
}

template <typename T>
void dense(const T* in, const T* w, const T* bias, T* out, int batch, int in_f, int out_f) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b)
    for (int o = 0; o < out_f; ++o)
      out[static_cast<size_t>(b) * out_f + o] =
          bias[o] + dot_lanes8(in + static_cast<size_t>(b) * in_f,
                               w + static_cast<size_t>(o) * in_f, in_f);
}

template <typename T>
void dense_grad_input(const T* dout, const T* w, T* din, int batch, int in_f, int out_f) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < batch; ++b)
    for (int i = 0; i < in_f; ++i) {
      T acc = T(0);
      for (int o = 0; o < out_f; ++o)
        acc += dout[static_cast<size_t>(b) * out_f + o] * w[static_cast<size_t>(o) * in_f + i];
      din[static_cast<size_t>(b) * in_f + i] = acc;
    }
}

template <typename T>
void dense_grad_params(const T* dout, const T* in, T* dw, T* db, int batch, int in_f, int out_f) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int o = 0; o < out_f; ++o)
    for (int i = 0; i < in_f; ++i) {
      T acc = T(0);
      for (int b = 0; b < batch; ++b)
        acc += dout[static_cast<size_t>(b) * out_f + o] * in[static_cast<size_t>(b) * in_f + i];
      dw[static_cast<size_t>(o) * in_f + i] += acc;
    }
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out_f; ++o) {
    T acc = T(0);
    for (int b = 0; b < batch; ++b) acc += dout[static_cast<size_t>(b) * out_f + o];
    db[o] += acc;
  }
}

template <typename T>
void softmax_rows(const T* in, T* out, int rows, int cols) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const T* x = in + static_cast<size_t>(r) * cols;
    T* y = out + static_cast<size_t>(r) * cols;
    T mx = x[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
    T sum = T(0);
    for (int c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      sum += y[c];
    }
    const T inv = T(1) / sum;
    for (int c = 0; c < cols; ++c) y[c] *= inv;
  }
}

#define MCSLOC_INSTANTIATE_KERNELS(T)                                                      \
  template void conv1d_same<T>(const T*, const T*, const T*, T*, const Conv1dShape&);     \
  template void conv1d_grad_input<T>(const T*, const T*, T*, const Conv1dShape&);         \
  template void conv1d_grad_params<T>(const T*, const T*, T*, T*, const Conv1dShape&);    \
  template void serial::conv1d_same<T>(const T*, const T*, const T*, T*,                  \
                                       const Conv1dShape&);                               \
  template void serial::conv1d_grad_input<T>(const T*, const T*, T*, const Conv1dShape&); \
  template void serial::conv1d_grad_params<T>(const T*, const T*, T*, T*,                 \
                                              const Conv1dShape&);                        \
  template void relu<T>(const T*, T*, size_t);                                            \
  template void relu_grad<T>(const T*, const T*, T*, size_t);                             \
  template void add<T>(const T*, const T*, T*, size_t);                                   \
  template void global_avg_pool<T>(const T*, T*, int, int, int);                          \
  template void global_avg_pool_grad<T>(const T*, T*, int, int, int);                     \
  template void dense<T>(const T*, const T*, const T*, T*, int, int, int);                \
  template void dense_grad_input<T>(const T*, const T*, T*, int, int, int);               \
  template void dense_grad_params<T>(const T*, const T*, T*, T*, int, int, int);          \
  template void softmax_rows<T>(const T*, T*, int, int);

MCSLOC_INSTANTIATE_KERNELS(float)
MCSLOC_INSTANTIATE_KERNELS(double)

}  // namespace mcsloc::kernels
