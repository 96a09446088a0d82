#pragma once

// AdamW with decoupled weight decay, the one-cycle learning-rate
// schedule, and the training loop.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcsloc/tcn.hpp"

namespace mcsloc {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-2;
  // off unless explicitly enabled
  bool clip_enabled = false;
  double clip_norm = 1.0;

  void validate() const;
};

struct OneCycleConfig {
  double max_lr = 1e-2;
  int64_t total_steps = 0;  // train() fills this in from the data size
  double pct_start = 0.3;
  double div_factor = 25.0;
  double final_div_factor = 1e4;

  void validate() const;
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  uint64_t seed = 1;
  int checkpoint_every = 0;  // epochs; 0 = final checkpoint only
  int microbatch = 8;        // memory bound for forward/backward chunks

  void validate() const;
};

// Cosine warmup from max_lr/div_factor to max_lr over the first
// round(pct_start * total_steps) steps, then cosine decay to
// (max_lr/div_factor)/final_div_factor at total_steps. Exact max_lr at
// the phase boundary.
double lr_at(const OneCycleConfig& cfg, int64_t step);

template <typename T>
struct AdamWState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  int64_t t = 0;

  explicit AdamWState(const Network<T>& net);
  AdamWState() = default;
};

// One tensor update:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   p <- p - lr (mhat/(sqrt(vhat)+eps) + wd * p)
// t is the 1-based step count after increment. Throws NumericError when
// a gradient is non-finite, naming the tensor.
template <typename T>
void adamw_update_tensor(T* p, const T* g, T* m, T* v, size_t n, int64_t t,
                         const AdamWConfig& cfg, double lr, const std::string& tensor_name);

// Whole-network step; bumps state.t once then updates every tensor.
template <typename T>
void adamw_step(Network<T>& net, const Gradients<T>& grads, AdamWState<T>& state,
                const AdamWConfig& cfg, double lr);

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double lr_last = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
};

// Labeled windows laid out as one flat buffer: example i occupies
// [i*example_size, (i+1)*example_size) with example_size = channels*length.
struct WindowSet {
  std::vector<float> data;
  std::vector<int> labels;
  int channels = 2;
  int length = 0;

  int size() const { return static_cast<int>(labels.size()); }
  size_t example_size() const { return static_cast<size_t>(channels) * length; }
};

// Seeded shuffling, per-epoch validation stats, optional checkpoint
// callback every cfg.checkpoint_every epochs (and after the last epoch).
TrainResult train(Network<float>& net, const WindowSet& train_set, const WindowSet& val_set,
                  const TrainConfig& tcfg, OneCycleConfig ocfg, const AdamWConfig& acfg,
                  const std::function<void(int, const Network<float>&)>& checkpoint_cb = {},
                  bool verbose = false);

std::string history_csv(const std::vector<EpochStats>& history);

}  // namespace mcsloc
