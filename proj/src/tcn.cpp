#include "mcsloc/tcn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "mcsloc/binio.hpp"
#include "mcsloc/errors.hpp"
#include "mcsloc/kernels.hpp"
#include "mcsloc/rng.hpp"
#include "nlohmann/json.hpp"

namespace mcsloc {

using kernels::Conv1dShape;

std::vector<int> NetworkConfig::dilation_schedule() const {
  if (!dilations.empty()) return dilations;
  std::vector<int> d(n_blocks);
  for (int i = 0; i < n_blocks; ++i) d[i] = 1 << (i + 1);
  return d;
}

void NetworkConfig::validate() const {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ValidationError("kernel_size must be odd and positive, got " +
                          std::to_string(kernel_size));
  if (n_filters < 1 || n_blocks < 1 || in_channels < 1 || hidden_width < 1 || n_classes < 2)
    throw ValidationError("network dimensions must be positive (n_classes >= 2)");
  const auto d = dilation_schedule();
  if (static_cast<int>(d.size()) != n_blocks)
    throw ValidationError("dilations length " + std::to_string(d.size()) +
                          " does not match n_blocks " + std::to_string(n_blocks));
  for (int v : d)
    if (v < 1) throw ValidationError("dilations must be >= 1");
}

int64_t parameter_count(const NetworkConfig& cfg) {
  const int64_t k = cfg.kernel_size, n = cfg.n_filters, in = cfg.in_channels;
  const int64_t h = cfg.hidden_width, cls = cfg.n_classes;
  // first block: conv1 in->n, conv2 n->n, shortcut in->n (1x1)
  int64_t count = (in * n * k + n) + (n * n * k + n) + (in * n + n);
  // remaining blocks: two n->n convs plus 1x1 shortcut
  count += static_cast<int64_t>(cfg.n_blocks - 1) * ((n * n * k + n) * 2 + (n * n + n));
  // head: dense n->h, dense h->classes
  count += (n * h + h) + (h * cls + cls);
  return count;
}

int64_t receptive_field(const NetworkConfig& cfg) {
  int64_t sum = 0;
  for (int d : cfg.dilation_schedule()) sum += d;
  return 1 + 2 * static_cast<int64_t>(cfg.kernel_size - 1) * sum;
}

namespace {

template <typename T>
ConvParams<T> make_conv(int in_ch, int out_ch, int kernel, int dilation) {
  ConvParams<T> p;
  p.in_channels = in_ch;
  p.out_channels = out_ch;
  p.kernel = kernel;
  p.dilation = dilation;
  p.weights.assign(static_cast<size_t>(out_ch) * in_ch * kernel, T(0));
  p.bias.assign(out_ch, T(0));
  return p;
}

template <typename T>
DenseParams<T> make_dense(int in_f, int out_f) {
  DenseParams<T> p;
  p.in_features = in_f;
  p.out_features = out_f;
  p.weights.assign(static_cast<size_t>(out_f) * in_f, T(0));
  p.bias.assign(out_f, T(0));
  return p;
}

template <typename T>
void fill_uniform(std::vector<T>& v, double bound, Rng& rng) {
  for (auto& x : v) x = static_cast<T>((2.0 * rng.uniform() - 1.0) * bound);
}

}  // namespace

template <typename T>
Network<T> Network<T>::make(const NetworkConfig& cfg) {
  cfg.validate();
  Network<T> net;
  net.cfg = cfg;
  const auto dil = cfg.dilation_schedule();
  for (int i = 0; i < cfg.n_blocks; ++i) {
    const int in_ch = i == 0 ? cfg.in_channels : cfg.n_filters;
    ResidualBlockParams<T> b;
    b.conv1 = make_conv<T>(in_ch, cfg.n_filters, cfg.kernel_size, dil[i]);
    b.conv2 = make_conv<T>(cfg.n_filters, cfg.n_filters, cfg.kernel_size, dil[i]);
    b.shortcut = make_conv<T>(in_ch, cfg.n_filters, 1, 1);
    net.blocks.push_back(std::move(b));
  }
  net.head_hidden = make_dense<T>(cfg.n_filters, cfg.hidden_width);
  net.head_out = make_dense<T>(cfg.hidden_width, cfg.n_classes);
  return net;
}

template <typename T>
Network<T> Network<T>::init(const NetworkConfig& cfg, uint64_t seed) {
  Network<T> net = make(cfg);
  Rng rng(derive_seed(seed, {0x696e6974}));  // "init"
  auto fill_conv = [&](ConvParams<T>& c) {
    const double bound = std::sqrt(1.0 / (static_cast<double>(c.in_channels) * c.kernel));
    fill_uniform(c.weights, bound, rng);
    fill_uniform(c.bias, bound, rng);
  };
  for (auto& b : net.blocks) {
    fill_conv(b.conv1);
    fill_conv(b.conv2);
    fill_conv(b.shortcut);
  }
  auto fill_dense_p = [&](DenseParams<T>& dp) {
    const double bound = std::sqrt(1.0 / static_cast<double>(dp.in_features));
    fill_uniform(dp.weights, bound, rng);
    fill_uniform(dp.bias, bound, rng);
  };
  fill_dense_p(net.head_hidden);
  fill_dense_p(net.head_out);
  return net;
}

namespace {

template <typename NetT, typename RefT>
std::vector<TensorRef<RefT>> collect_tensors(NetT& net) {
  std::vector<TensorRef<RefT>> out;
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    auto& b = net.blocks[i];
    const std::string prefix = "block" + std::to_string(i);
    auto add_conv = [&](auto& c, const std::string& nm) {
      out.push_back({prefix + "." + nm + ".weight",
                     {c.out_channels, c.in_channels, c.kernel},
                     std::span<RefT>(c.weights.data(), c.weights.size())});
      out.push_back({prefix + "." + nm + ".bias",
                     {c.out_channels},
                     std::span<RefT>(c.bias.data(), c.bias.size())});
    };
    add_conv(b.conv1, "conv1");
    add_conv(b.conv2, "conv2");
    add_conv(b.shortcut, "shortcut");
  }
  auto add_dense = [&](auto& dp, const std::string& nm) {
    out.push_back({nm + ".weight",
                   {dp.out_features, dp.in_features},
                   std::span<RefT>(dp.weights.data(), dp.weights.size())});
    out.push_back(
        {nm + ".bias", {dp.out_features}, std::span<RefT>(dp.bias.data(), dp.bias.size())});
  };
  add_dense(net.head_hidden, "head_hidden");
  add_dense(net.head_out, "head_out");
  return out;
}

}  // namespace

template <typename T>
std::vector<TensorRef<T>> Network<T>::tensors() {
  return collect_tensors<Network<T>, T>(*this);
}

template <typename T>
std::vector<TensorRef<const T>> Network<T>::tensors() const {
  return collect_tensors<const Network<T>, const T>(*this);
}

template <typename T>
int64_t Network<T>::scalar_count() const {
  int64_t n = 0;
  for (const auto& t : tensors()) n += static_cast<int64_t>(t.data.size());
  return n;
}

template <typename T>
Gradients<T>::Gradients(const Network<T>& net) {
  for (const auto& t : net.tensors()) tensors.emplace_back(t.data.size(), T(0));
}

template <typename T>
void Gradients<T>::zero() {
  for (auto& v : tensors) std::fill(v.begin(), v.end(), T(0));
}

template <typename T>
std::vector<T> conv1d_same(std::span<const T> input, int in_channels, int length,
                           const ConvParams<T>& p) {
  if (in_channels != p.in_channels)
    throw ValidationError("conv1d_same: input has " + std::to_string(in_channels) +
                          " channels, params expect " + std::to_string(p.in_channels));
  if (input.size() != static_cast<size_t>(in_channels) * length)
    throw ValidationError("conv1d_same: input size does not match channels x length");
  std::vector<T> out(static_cast<size_t>(p.out_channels) * length);
  Conv1dShape s{1, p.in_channels, p.out_channels, length, p.kernel, p.dilation};
  kernels::conv1d_same(input.data(), p.weights.data(), p.bias.data(), out.data(), s);
  return out;
}

template <typename T>
std::vector<T> residual_block_forward(std::span<const T> input, int in_channels, int length,
                                      const ResidualBlockParams<T>& p) {
  auto a = conv1d_same(input, in_channels, length, p.conv1);
  kernels::relu(a.data(), a.data(), a.size());
  auto m = conv1d_same<T>(a, p.conv1.out_channels, length, p.conv2);
  kernels::relu(m.data(), m.data(), m.size());
  auto sc = conv1d_same(input, in_channels, length, p.shortcut);
  kernels::add(m.data(), sc.data(), m.data(), m.size());
  return m;
}

template <typename T>
std::vector<T> global_avg_pool(std::span<const T> input, int channels, int length) {
  if (length < 1) throw ValidationError("global_avg_pool: length must be >= 1");
  std::vector<T> out(channels);
  kernels::global_avg_pool(input.data(), out.data(), 1, channels, length);
  return out;
}

template <typename T>
std::vector<T> forward(const Network<T>& net, std::span<const T> batch, int batch_size,
                       int length, ForwardCache<T>* cache) {
  const auto& cfg = net.cfg;
  if (batch.size() != static_cast<size_t>(batch_size) * cfg.in_channels * length)
    throw ValidationError("forward: batch size does not match B x in_channels x L");
  const int N = cfg.n_filters;
  const size_t plane = static_cast<size_t>(batch_size) * N * length;

  if (cache) {
    cache->batch = batch_size;
    cache->length = length;
    cache->block_in.assign(cfg.n_blocks, {});
    cache->act1.assign(cfg.n_blocks, {});
    cache->pre2.assign(cfg.n_blocks, {});
  }

  std::vector<T> cur(batch.begin(), batch.end());
  int cur_ch = cfg.in_channels;
  std::vector<T> act1_buf, pre2_buf, sc_buf(plane);
  for (int i = 0; i < cfg.n_blocks; ++i) {
    const auto& blk = net.blocks[i];
    if (cache) cache->block_in[i] = cur;
    act1_buf.assign(plane, T(0));
    Conv1dShape s1{batch_size, cur_ch, N, length, blk.conv1.kernel, blk.conv1.dilation};
    kernels::conv1d_same(cur.data(), blk.conv1.weights.data(), blk.conv1.bias.data(),
                         act1_buf.data(), s1);
    kernels::relu(act1_buf.data(), act1_buf.data(), act1_buf.size());
    pre2_buf.assign(plane, T(0));
    Conv1dShape s2{batch_size, N, N, length, blk.conv2.kernel, blk.conv2.dilation};
    kernels::conv1d_same(act1_buf.data(), blk.conv2.weights.data(), blk.conv2.bias.data(),
                         pre2_buf.data(), s2);
    Conv1dShape ss{batch_size, cur_ch, N, length, 1, 1};
    kernels::conv1d_same(cur.data(), blk.shortcut.weights.data(), blk.shortcut.bias.data(),
                         sc_buf.data(), ss);
    std::vector<T> next(plane);
    kernels::relu(pre2_buf.data(), next.data(), plane);
    kernels::add(next.data(), sc_buf.data(), next.data(), plane);
    if (cache) {
      cache->act1[i] = act1_buf;
      cache->pre2[i] = std::move(pre2_buf);
      pre2_buf = {};
    }
    cur = std::move(next);
    cur_ch = N;
  }

  std::vector<T> pooled(static_cast<size_t>(batch_size) * N);
  kernels::global_avg_pool(cur.data(), pooled.data(), batch_size, N, length);
  if (cache) cache->trunk_out = std::move(cur);

  std::vector<T> hidden(static_cast<size_t>(batch_size) * cfg.hidden_width);
  kernels::dense(pooled.data(), net.head_hidden.weights.data(), net.head_hidden.bias.data(),
                 hidden.data(), batch_size, N, cfg.hidden_width);
  kernels::relu(hidden.data(), hidden.data(), hidden.size());

  std::vector<T> logits(static_cast<size_t>(batch_size) * cfg.n_classes);
  kernels::dense(hidden.data(), net.head_out.weights.data(), net.head_out.bias.data(),
                 logits.data(), batch_size, cfg.hidden_width, cfg.n_classes);
  kernels::softmax_rows(logits.data(), logits.data(), batch_size, cfg.n_classes);

  if (cache) {
    cache->pooled = std::move(pooled);
    cache->hidden_act = std::move(hidden);
    cache->probs = logits;
  }
  return logits;
}

template <typename T>
T cross_entropy(std::span<const T> probs, std::span<const int> labels, int n_classes) {
  const int B = static_cast<int>(labels.size());
  if (probs.size() != static_cast<size_t>(B) * n_classes)
    throw ValidationError("cross_entropy: probs size does not match labels x classes");
  T sum = T(0);
  for (int b = 0; b < B; ++b) {
    const int y = labels[b];
    if (y < 0 || y >= n_classes)
      throw ValidationError("cross_entropy: label " + std::to_string(y) + " out of range [0," +
                            std::to_string(n_classes - 1) + "]");
    const T p = std::max(probs[static_cast<size_t>(b) * n_classes + y], T(1e-12));
    sum -= std::log(p);
  }
  return sum / static_cast<T>(B);
}

template <typename T>
void backward(const Network<T>& net, const ForwardCache<T>& cache, std::span<const int> labels,
              T loss_scale, Gradients<T>& grads) {
  const auto& cfg = net.cfg;
  const int B = cache.batch;
  const int L = cache.length;
  const int N = cfg.n_filters;
  const size_t plane = static_cast<size_t>(B) * N * L;
  if (static_cast<int>(labels.size()) != B)
    throw ValidationError("backward: labels do not match cached batch");

  // index of each tensor in the canonical order: per block
  // (w1,b1,w2,b2,ws,bs), then head_hidden (w,b), head_out (w,b)
  auto g = [&](size_t idx) { return grads.tensors[idx].data(); };
  const size_t head_hidden_w = 6 * static_cast<size_t>(cfg.n_blocks);

  // d logits = (softmax - onehot) * loss_scale
  std::vector<T> dlogits(cache.probs);
  for (int b = 0; b < B; ++b) {
    dlogits[static_cast<size_t>(b) * cfg.n_classes + labels[b]] -= T(1);
  }
  for (auto& v : dlogits) v *= loss_scale;

  kernels::dense_grad_params(dlogits.data(), cache.hidden_act.data(), g(head_hidden_w + 2),
                             g(head_hidden_w + 3), B, cfg.hidden_width, cfg.n_classes);
  std::vector<T> dhidden(static_cast<size_t>(B) * cfg.hidden_width);
  kernels::dense_grad_input(dlogits.data(), net.head_out.weights.data(), dhidden.data(), B,
                            cfg.hidden_width, cfg.n_classes);
  kernels::relu_grad(cache.hidden_act.data(), dhidden.data(), dhidden.data(), dhidden.size());

  kernels::dense_grad_params(dhidden.data(), cache.pooled.data(), g(head_hidden_w),
                             g(head_hidden_w + 1), B, N, cfg.hidden_width);
  std::vector<T> dpooled(static_cast<size_t>(B) * N);
  kernels::dense_grad_input(dhidden.data(), net.head_hidden.weights.data(), dpooled.data(), B, N,
                            cfg.hidden_width);

  std::vector<T> dcur(plane);
  kernels::global_avg_pool_grad(dpooled.data(), dcur.data(), B, N, L);

  std::vector<T> dmain(plane), dact1(plane);
  for (int i = cfg.n_blocks - 1; i >= 0; --i) {
    const auto& blk = net.blocks[i];
    const int in_ch = i == 0 ? cfg.in_channels : N;
    const size_t gbase = 6 * static_cast<size_t>(i);
    const std::vector<T>& x = cache.block_in[i];

    // main path: dOut through the post-conv2 ReLU
    kernels::relu_grad(cache.pre2[i].data(), dcur.data(), dmain.data(), plane);
    Conv1dShape s2{B, N, N, L, blk.conv2.kernel, blk.conv2.dilation};
    kernels::conv1d_grad_params(dmain.data(), cache.act1[i].data(), g(gbase + 2), g(gbase + 3),
                                s2);
    kernels::conv1d_grad_input(dmain.data(), blk.conv2.weights.data(), dact1.data(), s2);
    kernels::relu_grad(cache.act1[i].data(), dact1.data(), dact1.data(), plane);
    Conv1dShape s1{B, in_ch, N, L, blk.conv1.kernel, blk.conv1.dilation};
    kernels::conv1d_grad_params(dact1.data(), x.data(), g(gbase), g(gbase + 1), s1);

    // shortcut path
    Conv1dShape ss{B, in_ch, N, L, 1, 1};
    kernels::conv1d_grad_params(dcur.data(), x.data(), g(gbase + 4), g(gbase + 5), ss);

    // input gradient: shortcut first, then the main path added on top
    std::vector<T> dx(static_cast<size_t>(B) * in_ch * L);
    kernels::conv1d_grad_input(dcur.data(), blk.shortcut.weights.data(), dx.data(), ss);
    std::vector<T> dx_main(dx.size());
    kernels::conv1d_grad_input(dact1.data(), blk.conv1.weights.data(), dx_main.data(), s1);
    kernels::add(dx.data(), dx_main.data(), dx.data(), dx.size());
    dcur = std::move(dx);
  }
}

template <typename T>
T forward_backward(const Network<T>& net, std::span<const T> batch, std::span<const int> labels,
                   int batch_size, int length, Gradients<T>& grads, int chunk) {
  grads.zero();
  const int C = net.cfg.in_channels;
  const size_t ex = static_cast<size_t>(C) * length;
  const T scale = T(1) / static_cast<T>(batch_size);
  T loss_sum = T(0);
  for (int start = 0; start < batch_size; start += chunk) {
    const int n = std::min(chunk, batch_size - start);
    ForwardCache<T> cache;
    auto probs = forward(net, batch.subspan(static_cast<size_t>(start) * ex, n * ex), n, length,
                         &cache);
    const auto lab = labels.subspan(start, n);
    loss_sum += cross_entropy<T>(probs, lab, net.cfg.n_classes) * static_cast<T>(n);
    backward(net, cache, lab, scale, grads);
  }
  return loss_sum / static_cast<T>(batch_size);
}

template <typename T>
std::vector<int> predict(const Network<T>& net, std::span<const T> batch, int batch_size,
                         int length, int chunk) {
  const int C = net.cfg.in_channels;
  const int cls = net.cfg.n_classes;
  const size_t ex = static_cast<size_t>(C) * length;
  std::vector<int> out(batch_size);
  for (int start = 0; start < batch_size; start += chunk) {
    const int n = std::min(chunk, batch_size - start);
    auto probs = forward(net, batch.subspan(static_cast<size_t>(start) * ex, n * ex), n, length);
    for (int b = 0; b < n; ++b) {
      const T* row = probs.data() + static_cast<size_t>(b) * cls;
      int best = 0;
      for (int c = 1; c < cls; ++c)
        if (row[c] > row[best]) best = c;
      out[start + b] = best;
    }
  }
  return out;
}

namespace {

constexpr char kCheckpointMagic[8] = {'M', 'C', 'S', 'L', 'N', 'E', 'T', '1'};

nlohmann::ordered_json config_to_json(const NetworkConfig& cfg) {
  nlohmann::ordered_json j;
  j["kernel_size"] = cfg.kernel_size;
  j["n_filters"] = cfg.n_filters;
  j["n_blocks"] = cfg.n_blocks;
  j["dilations"] = cfg.dilation_schedule();
  j["in_channels"] = cfg.in_channels;
  j["hidden_width"] = cfg.hidden_width;
  j["n_classes"] = cfg.n_classes;
  return j;
}

NetworkConfig config_from_json(const nlohmann::json& j) {
  NetworkConfig cfg;
  cfg.kernel_size = j.at("kernel_size").get<int>();
  cfg.n_filters = j.at("n_filters").get<int>();
  cfg.n_blocks = j.at("n_blocks").get<int>();
  cfg.dilations = j.at("dilations").get<std::vector<int>>();
  cfg.in_channels = j.at("in_channels").get<int>();
  cfg.hidden_width = j.at("hidden_width").get<int>();
  cfg.n_classes = j.at("n_classes").get<int>();
  return cfg;
}

}  // namespace

void save_checkpoint(const Network<float>& net, const std::filesystem::path& path) {
  std::string out;
  out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::string cfg_json = config_to_json(net.cfg).dump();
  binio::put_u32(out, static_cast<uint32_t>(cfg_json.size()));
  out += cfg_json;
  const auto tensors = net.tensors();
  binio::put_u32(out, static_cast<uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    binio::put_u32(out, static_cast<uint32_t>(t.name.size()));
    out += t.name;
    binio::put_u32(out, static_cast<uint32_t>(t.shape.size()));
    for (int dim : t.shape) binio::put_u32(out, static_cast<uint32_t>(dim));
    binio::put_u64(out, t.data.size());
    for (float v : t.data) binio::put_f32(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FormatError("short write to checkpoint: " + path.string());
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open checkpoint: " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const uint8_t* p = reinterpret_cast<const uint8_t*>(data.data());
  const uint8_t* end = p + data.size();
  auto need = [&](size_t n) {
    if (static_cast<size_t>(end - p) < n)
      throw FormatError("truncated checkpoint: " + path.string());
  };
  need(sizeof(kCheckpointMagic));
  if (std::memcmp(p, kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
    throw FormatError("bad checkpoint magic in " + path.string());
  p += sizeof(kCheckpointMagic);
  need(4);
  const uint32_t json_len = binio::get_u32(p);
  p += 4;
  need(json_len);
  NetworkConfig cfg;
  try {
    cfg = config_from_json(nlohmann::json::parse(std::string(p, p + json_len)));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad checkpoint config JSON: " + std::string(e.what()));
  }
  p += json_len;
  auto net = Network<float>::make(cfg);
  auto tensors = net.tensors();
  need(4);
  const uint32_t n_tensors = binio::get_u32(p);
  p += 4;
  if (n_tensors != tensors.size())
    throw FormatError("checkpoint has " + std::to_string(n_tensors) + " tensors, config needs " +
                      std::to_string(tensors.size()));
  for (uint32_t i = 0; i < n_tensors; ++i) {
    need(4);
    const uint32_t name_len = binio::get_u32(p);
    p += 4;
    need(name_len);
    const std::string name(p, p + name_len);
    p += name_len;
    if (name != tensors[i].name)
      throw FormatError("checkpoint tensor '" + name + "' does not match expected '" +
                        tensors[i].name + "'");
    need(4);
    const uint32_t ndim = binio::get_u32(p);
    p += 4;
    need(4 * static_cast<size_t>(ndim));
    std::vector<int> shape(ndim);
    for (auto& dim : shape) {
      dim = static_cast<int>(binio::get_u32(p));
      p += 4;
    }
    if (shape != tensors[i].shape)
      throw FormatError("checkpoint tensor '" + name + "' has unexpected shape");
    need(8);
    const uint64_t count = binio::get_u64(p);
    p += 8;
    if (count != tensors[i].data.size())
      throw FormatError("checkpoint tensor '" + name + "' has unexpected element count");
    need(4 * count);
    for (uint64_t k = 0; k < count; ++k) {
      tensors[i].data[k] = binio::get_f32(p);
      p += 4;
    }
  }
  if (p != end) throw FormatError("trailing bytes in checkpoint: " + path.string());
  return net;
}

#define MCSLOC_INSTANTIATE_TCN(T)                                                              \
  template struct Network<T>;                                                                  \
  template struct Gradients<T>;                                                                \
  template std::vector<T> conv1d_same<T>(std::span<const T>, int, int, const ConvParams<T>&); \
  template std::vector<T> residual_block_forward<T>(std::span<const T>, int, int,             \
                                                    const ResidualBlockParams<T>&);           \
  template std::vector<T> global_avg_pool<T>(std::span<const T>, int, int);                   \
  template std::vector<T> forward<T>(const Network<T>&, std::span<const T>, int, int,         \
                                     ForwardCache<T>*);                                       \
  template T cross_entropy<T>(std::span<const T>, std::span<const int>, int);                 \
  template void backward<T>(const Network<T>&, const ForwardCache<T>&, std::span<const int>,  \
                            T, Gradients<T>&);                                                \
  template T forward_backward<T>(const Network<T>&, std::span<const T>, std::span<const int>, \
                                 int, int, Gradients<T>&, int);                               \
  template std::vector<int> predict<T>(const Network<T>&, std::span<const T>, int, int, int);

MCSLOC_INSTANTIATE_TCN(float)
MCSLOC_INSTANTIATE_TCN(double)

}  // namespace mcsloc
