#pragma once

// Dilated-residual convolutional classifier over raw I/Q windows.
// Non-causal "same" convolutions; each residual block is
//   out = ReLU(conv2(ReLU(conv1(x)))) + shortcut(x)
// with a 1x1 shortcut in every block, followed by global average
// pooling, one hidden dense layer with ReLU and a softmax output layer.
//
// Everything is templated on the scalar type: float for training and
// inference, double for the finite-difference tests.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mcsloc {

struct NetworkConfig {
  int kernel_size = 5;
  int n_filters = 64;
  int n_blocks = 8;
  std::vector<int> dilations;  // empty => 2^(i+1) for block i
  int in_channels = 2;
  int hidden_width = 256;
  int n_classes = 9;

  std::vector<int> dilation_schedule() const;  // resolved (never empty)
  void validate() const;                       // throws ValidationError
};

// Closed-form trainable-scalar count for a config.
int64_t parameter_count(const NetworkConfig& cfg);

// 1 + 2*(k-1)*sum(dilations): two convolutions per block, symmetric taps.
int64_t receptive_field(const NetworkConfig& cfg);

template <typename T>
struct ConvParams {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int dilation = 1;
  std::vector<T> weights;  // [out][in][kernel]
  std::vector<T> bias;     // [out]
};

template <typename T>
struct DenseParams {
  int in_features = 0;
  int out_features = 0;
  std::vector<T> weights;  // [out][in]
  std::vector<T> bias;     // [out]
};

template <typename T>
struct ResidualBlockParams {
  ConvParams<T> conv1;
  ConvParams<T> conv2;
  ConvParams<T> shortcut;  // kernel 1, dilation 1
};

// Named view of one parameter tensor; the order of Network::tensors() is
// the canonical order for optimizer state and checkpoints.
template <typename T>
struct TensorRef {
  std::string name;
  std::vector<int> shape;
  std::span<T> data;
};

template <typename T>
struct Network {
  NetworkConfig cfg;
  std::vector<ResidualBlockParams<T>> blocks;
  DenseParams<T> head_hidden;
  DenseParams<T> head_out;

  // Zero-sized network from config (all parameter buffers allocated).
  static Network make(const NetworkConfig& cfg);
  // Seeded default initialization: uniform(-sqrt(1/fan_in), sqrt(1/fan_in)).
  static Network init(const NetworkConfig& cfg, uint64_t seed);

  std::vector<TensorRef<T>> tensors();
  std::vector<TensorRef<const T>> tensors() const;
  int64_t scalar_count() const;
};

// Gradient buffers with the same layout as the network parameters.
template <typename T>
struct Gradients {
  std::vector<std::vector<T>> tensors;  // parallel to Network::tensors()
  explicit Gradients(const Network<T>& net);
  void zero();
};

// Single-example / single-activation ops mirroring the network pieces.
// input is [channels][length] row-major; used directly by unit tests.
template <typename T>
std::vector<T> conv1d_same(std::span<const T> input, int in_channels, int length,
                           const ConvParams<T>& p);
template <typename T>
std::vector<T> residual_block_forward(std::span<const T> input, int in_channels, int length,
                                      const ResidualBlockParams<T>& p);
template <typename T>
std::vector<T> global_avg_pool(std::span<const T> input, int channels, int length);

// Batched forward. batch is [B][in_channels][L]; returns row-normalized
// class probabilities [B][n_classes]. When cache != nullptr the
// activations needed by backward() are retained.
template <typename T>
struct ForwardCache;

template <typename T>
std::vector<T> forward(const Network<T>& net, std::span<const T> batch, int batch_size,
                       int length, ForwardCache<T>* cache = nullptr);

// Mean over the batch of -log(prob[label]), probabilities floored at 1e-12.
template <typename T>
T cross_entropy(std::span<const T> probs, std::span<const int> labels, int n_classes);

// Exact analytic gradients of the mean cross-entropy. `loss_scale` is the
// weight of this batch's summed per-example gradients (1/B for a plain
// batch; microbatching passes 1/total_B and accumulates). Gradients are
// accumulated into `grads`.
template <typename T>
void backward(const Network<T>& net, const ForwardCache<T>& cache, std::span<const int> labels,
              T loss_scale, Gradients<T>& grads);

// forward + cross_entropy + backward over microbatches of at most
// `chunk` examples; bounded memory, deterministic accumulation order.
// Returns the mean loss; `grads` is zeroed first.
template <typename T>
T forward_backward(const Network<T>& net, std::span<const T> batch, std::span<const int> labels,
                   int batch_size, int length, Gradients<T>& grads, int chunk = 8);

// Argmax class per example (lowest index wins ties), inference only.
template <typename T>
std::vector<int> predict(const Network<T>& net, std::span<const T> batch, int batch_size,
                         int length, int chunk = 16);

// Checkpoint container: magic, NetworkConfig JSON, then one record per
// tensor (name, shape, raw little-endian binary32). Layout documented in
// the README and stable.
void save_checkpoint(const Network<float>& net, const std::filesystem::path& path);
Network<float> load_checkpoint(const std::filesystem::path& path);

template <typename T>
struct ForwardCache {
  int batch = 0;
  int length = 0;
  // per block: input to the block, relu(conv1) activation, conv2 pre-relu
  std::vector<std::vector<T>> block_in;
  std::vector<std::vector<T>> act1;
  std::vector<std::vector<T>> pre2;
  std::vector<T> trunk_out;
  std::vector<T> pooled;
  std::vector<T> hidden_act;
  std::vector<T> probs;
};

}  // namespace mcsloc
