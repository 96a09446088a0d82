#include "mcsloc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mcsloc/errors.hpp"
#include "mcsloc/rng.hpp"

namespace mcsloc {

void AdamWConfig::validate() const {
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ValidationError("AdamW betas must lie in [0,1)");
  if (epsilon <= 0.0) throw ValidationError("AdamW epsilon must be positive");
  if (weight_decay < 0.0) throw ValidationError("AdamW weight_decay must be >= 0");
  if (clip_enabled && clip_norm <= 0.0)
    throw ValidationError("AdamW clip_norm must be positive when clipping is enabled");
}

void OneCycleConfig::validate() const {
  if (max_lr <= 0.0) throw ValidationError("one-cycle max_lr must be positive");
  if (pct_start <= 0.0 || pct_start >= 1.0)
    throw ValidationError("one-cycle pct_start must lie in (0,1)");
  if (div_factor <= 1.0 || final_div_factor <= 1.0)
    throw ValidationError("one-cycle div factors must be > 1");
  if (total_steps < 1) throw ValidationError("one-cycle total_steps must be >= 1");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (checkpoint_every < 0) throw ValidationError("checkpoint_every must be >= 0");
  if (microbatch < 1) throw ValidationError("microbatch must be >= 1");
}

double lr_at(const OneCycleConfig& cfg, int64_t step) {
  cfg.validate();
  if (step < 0 || step > cfg.total_steps)
    throw ValidationError("lr_at: step " + std::to_string(step) + " outside [0," +
                          std::to_string(cfg.total_steps) + "]");
  const double min_lr = cfg.max_lr / cfg.div_factor;
  const double final_lr = min_lr / cfg.final_div_factor;
  const int64_t warmup = std::max<int64_t>(1, std::llround(cfg.pct_start * cfg.total_steps));
  if (step <= warmup) {
    const double f = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(step) / warmup));
    return min_lr + (cfg.max_lr - min_lr) * f;
  }
  const int64_t span = cfg.total_steps - warmup;
  const double f = 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(step - warmup) / span));
  return final_lr + (cfg.max_lr - final_lr) * f;
}

template <typename T>
AdamWState<T>::AdamWState(const Network<T>& net) {
  for (const auto& tr : net.tensors()) {
    m.emplace_back(tr.data.size(), T(0));
    v.emplace_back(tr.data.size(), T(0));
  }
}

template <typename T>
void adamw_update_tensor(T* p, const T* g, T* m, T* v, size_t n, int64_t t,
                         const AdamWConfig& cfg, double lr, const std::string& tensor_name) {
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(static_cast<double>(g[i])))
      throw NumericError("non-finite gradient in tensor " + tensor_name);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T eps = static_cast<T>(cfg.epsilon);
  const T wd = static_cast<T>(cfg.weight_decay);
  const T lrT = static_cast<T>(lr);
  const T c1 = T(1) - static_cast<T>(std::pow(cfg.beta1, static_cast<double>(t)));
  const T c2 = T(1) - static_cast<T>(std::pow(cfg.beta2, static_cast<double>(t)));
#pragma omp parallel for schedule(static)
  for (ptrdiff_t i = 0; i < static_cast<ptrdiff_t>(n); ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * g[i];
    v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
    const T mhat = m[i] / c1;
    const T vhat = v[i] / c2;
    p[i] -= lrT * (mhat / (std::sqrt(vhat) + eps) + wd * p[i]);
  }
}

template <typename T>
void adamw_step(Network<T>& net, const Gradients<T>& grads, AdamWState<T>& state,
                const AdamWConfig& cfg, double lr) {
  state.t += 1;
  auto tensors = net.tensors();
  if (tensors.size() != grads.tensors.size() || tensors.size() != state.m.size())
    throw ValidationError("adamw_step: tensor count mismatch");
  double scale = 1.0;
  if (cfg.clip_enabled) {
    double sq = 0.0;
    for (const auto& gv : grads.tensors)
      for (T x : gv) sq += static_cast<double>(x) * static_cast<double>(x);
    const double norm = std::sqrt(sq);
    if (norm > cfg.clip_norm) scale = cfg.clip_norm / norm;
  }
  for (size_t i = 0; i < tensors.size(); ++i) {
    const T* g = grads.tensors[i].data();
    std::vector<T> scaled;
    if (scale != 1.0) {
      scaled.assign(grads.tensors[i].begin(), grads.tensors[i].end());
      for (auto& x : scaled) x *= static_cast<T>(scale);
      g = scaled.data();
    }
    adamw_update_tensor<T>(tensors[i].data.data(), g, state.m[i].data(), state.v[i].data(),
                           tensors[i].data.size(), state.t, cfg, lr, tensors[i].name);
  }
}

namespace {

struct ValStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

ValStats evaluate(const Network<float>& net, const WindowSet& set, int chunk) {
  ValStats out;
  if (set.size() == 0) return out;
  const int n = set.size();
  const size_t ex = set.example_size();
  double loss_sum = 0.0;
  int correct = 0;
  for (int start = 0; start < n; start += chunk) {
    const int b = std::min(chunk, n - start);
    auto probs = forward<float>(
        net, std::span<const float>(set.data.data() + start * ex, b * ex), b, set.length);
    const std::span<const int> lab(set.labels.data() + start, b);
    loss_sum += static_cast<double>(cross_entropy<float>(probs, lab, net.cfg.n_classes)) * b;
    for (int i = 0; i < b; ++i) {
      const float* row = probs.data() + static_cast<size_t>(i) * net.cfg.n_classes;
      int best = 0;
      for (int c = 1; c < net.cfg.n_classes; ++c)
        if (row[c] > row[best]) best = c;
      if (best == lab[i]) ++correct;
    }
  }
  out.loss = loss_sum / n;
  out.accuracy = static_cast<double>(correct) / n;
  return out;
}

}  // namespace

TrainResult train(Network<float>& net, const WindowSet& train_set, const WindowSet& val_set,
                  const TrainConfig& tcfg, OneCycleConfig ocfg, const AdamWConfig& acfg,
                  const std::function<void(int, const Network<float>&)>& checkpoint_cb,
                  bool verbose) {
  tcfg.validate();
  acfg.validate();
  if (train_set.size() == 0) throw ValidationError("train: empty training set");
  if (train_set.length <= 0 || train_set.channels != net.cfg.in_channels)
    throw ValidationError("train: window shape does not match network input");

  const int n = train_set.size();
  const int steps_per_epoch = (n + tcfg.batch_size - 1) / tcfg.batch_size;
  ocfg.total_steps = static_cast<int64_t>(tcfg.epochs) * steps_per_epoch;
  ocfg.validate();

  Gradients<float> grads(net);
  AdamWState<float> state(net);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const size_t ex = train_set.example_size();
  std::vector<float> batch_buf(static_cast<size_t>(tcfg.batch_size) * ex);
  std::vector<int> batch_labels(tcfg.batch_size);

  TrainResult result;
  int64_t step = 0;
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(tcfg.seed, {0x73687566, static_cast<uint64_t>(epoch)}));
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.below(static_cast<uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    double loss_sum = 0.0;
    double last_lr = 0.0;
    for (int start = 0; start < n; start += tcfg.batch_size) {
      const int b = std::min(tcfg.batch_size, n - start);
      for (int i = 0; i < b; ++i) {
        const int src = order[start + i];
        std::copy_n(train_set.data.data() + static_cast<size_t>(src) * ex, ex,
                    batch_buf.data() + static_cast<size_t>(i) * ex);
        batch_labels[i] = train_set.labels[src];
      }
      const float loss = forward_backward<float>(
          net, std::span<const float>(batch_buf.data(), static_cast<size_t>(b) * ex),
          std::span<const int>(batch_labels.data(), b), b, train_set.length, grads,
          tcfg.microbatch);
      if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
      last_lr = lr_at(ocfg, step);
      adamw_step(net, grads, state, acfg, last_lr);
      loss_sum += static_cast<double>(loss) * b;
      ++step;
    }
    const ValStats vs = evaluate(net, val_set, std::max(tcfg.microbatch, 8));
    EpochStats es;
    es.epoch = epoch;
    es.train_loss = loss_sum / n;
    es.val_loss = vs.loss;
    es.val_accuracy = vs.accuracy;
    es.lr_last = last_lr;
    result.history.push_back(es);
    if (verbose)
      std::printf("epoch %3d  train_loss %.5f  val_loss %.5f  val_acc %.4f  lr %.3g\n", epoch,
                  es.train_loss, es.val_loss, es.val_accuracy, es.lr_last);
    if (checkpoint_cb &&
        ((tcfg.checkpoint_every > 0 && epoch % tcfg.checkpoint_every == 0) ||
         epoch == tcfg.epochs))
      checkpoint_cb(epoch, net);
  }
  return result;
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,train_loss,val_loss,val_accuracy,lr_last\n";
  char line[192];
  for (const auto& e : history) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss,
                  e.val_loss, e.val_accuracy, e.lr_last);
    out += line;
  }
  return out;
}

template struct AdamWState<float>;
template struct AdamWState<double>;
template void adamw_update_tensor<float>(float*, const float*, float*, float*, size_t, int64_t,
                                         const AdamWConfig&, double, const std::string&);
template void adamw_update_tensor<double>(double*, const double*, double*, double*, size_t,
                                          int64_t, const AdamWConfig&, double,
                                          const std::string&);
template void adamw_step<float>(Network<float>&, const Gradients<float>&, AdamWState<float>&,
                                const AdamWConfig&, double);
template void adamw_step<double>(Network<double>&, const Gradients<double>&,
                                 AdamWState<double>&, const AdamWConfig&, double);

}  // namespace mcsloc
