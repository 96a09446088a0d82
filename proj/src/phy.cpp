#include "mcsloc/phy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "mcsloc/errors.hpp"
#include "mcsloc/rng.hpp"

namespace mcsloc {

namespace {

// LTE uplink index-to-modulation regions with effective code rates for a
// 6-PRB allocation (transport block + CRC over the available coded bits).
// Indices 29-31 are the retransmission rows; they carry the region's
// modulation order and a nominal rate above the regular entries.
struct RawEntry {
  int q;
  double rate;
};

const RawEntry kLteUplink6Prb[32] = {
    {2, 176.0 / 1728.0},  {2, 232.0 / 1728.0},  {2, 280.0 / 1728.0},  {2, 352.0 / 1728.0},
    {2, 432.0 / 1728.0},  {2, 528.0 / 1728.0},  {2, 624.0 / 1728.0},  {2, 736.0 / 1728.0},
    {2, 832.0 / 1728.0},  {2, 960.0 / 1728.0},  {2, 1056.0 / 1728.0}, {4, 1056.0 / 3456.0},
    {4, 1216.0 / 3456.0}, {4, 1376.0 / 3456.0}, {4, 1568.0 / 3456.0}, {4, 1760.0 / 3456.0},
    {4, 1824.0 / 3456.0}, {4, 1952.0 / 3456.0}, {4, 2176.0 / 3456.0}, {4, 2368.0 / 3456.0},
    {4, 2624.0 / 3456.0}, {6, 2624.0 / 5184.0}, {6, 2816.0 / 5184.0}, {6, 3008.0 / 5184.0},
    {6, 3264.0 / 5184.0}, {6, 3520.0 / 5184.0}, {6, 3776.0 / 5184.0}, {6, 3904.0 / 5184.0},
    {6, 4288.0 / 5184.0}, {2, 0.65},            {4, 0.80},            {6, 0.90},
};

}  // namespace

McsTable McsTable::lte_default() {
  McsTable t;
  t.entries_.resize(32);
  for (int i = 0; i < 32; ++i)
    t.entries_[i] = McsEntry{i, kLteUplink6Prb[i].q, kLteUplink6Prb[i].rate};
  t.validate();
  return t;
}

McsTable McsTable::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open MCS table: " + path.string());
  McsTable t;
  t.entries_.resize(32);
  std::vector<bool> seen(32, false);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    int index = -1, order = 0;
    double rate = 0.0;
    char c1 = 0, c2 = 0;
    if (!(ss >> index >> c1 >> order >> c2 >> rate) || c1 != ',' || c2 != ',')
      throw FormatError("bad MCS table line " + std::to_string(lineno) + " in " + path.string());
    if (index < 0 || index > 31)
      throw ValidationError("MCS table index " + std::to_string(index) + " out of [0,31]");
    if (seen[index])
      throw ValidationError("duplicate MCS table index " + std::to_string(index));
    seen[index] = true;
    t.entries_[index] = McsEntry{index, order, rate};
  }
  for (int i = 0; i < 32; ++i)
    if (!seen[i]) throw ValidationError("MCS table missing index " + std::to_string(i));
  t.validate();
  return t;
}

void McsTable::validate() const {
  double last_rate[7] = {};
  for (const auto& e : entries_) {
    if (e.modulation_order != 2 && e.modulation_order != 4 && e.modulation_order != 6)
      throw ValidationError("MCS " + std::to_string(e.index) + ": modulation_order " +
                            std::to_string(e.modulation_order) + " not in {2,4,6}");
    if (e.code_rate <= 0.0 || e.code_rate >= 1.0)
      throw ValidationError("MCS " + std::to_string(e.index) + ": code_rate outside (0,1)");
    double& prev = last_rate[e.modulation_order];
    if (prev != 0.0 && e.code_rate <= prev)
      throw ValidationError("MCS " + std::to_string(e.index) +
                            ": code_rate not strictly increasing within modulation order");
    prev = e.code_rate;
  }
}

const McsEntry& McsTable::lookup(int index) const {
  if (index < 0 || index > 31)
    throw ValidationError("MCS index " + std::to_string(index) + " out of [0,31]");
  return entries_[static_cast<size_t>(index)];
}

void SignalConfig::validate() const {
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
    throw ValidationError("fft_size must be a power of two, got " + std::to_string(fft_size));
  if (cyclic_prefix_len < 0 || cyclic_prefix_len >= fft_size)
    throw ValidationError("cyclic_prefix_len must lie in [0, fft_size)");
  if (n_resource_blocks < 1) throw ValidationError("n_resource_blocks must be >= 1");
  if (subcarrier_spacing_hz <= 0.0 || sample_rate_hz <= 0.0)
    throw ValidationError("rates must be positive");
  if (fft_size * subcarrier_spacing_hz < occupied_bandwidth_hz)
    throw ValidationError("fft_size x subcarrier_spacing must cover the occupied bandwidth");
  if (occupied_bandwidth_hz >= sample_rate_hz)
    throw ValidationError("occupied bandwidth must be below the sample rate (Nyquist)");
  if (n_subcarriers() > fft_size - 2)
    throw ValidationError("subcarriers (12 x n_resource_blocks) do not fit in the FFT grid");
}

double measure_power(const IqBuffer& signal) {
  if (signal.samples.empty()) throw ValidationError("measure_power: empty buffer");
  double acc = 0.0;
  for (const auto& s : signal.samples) {
    const double re = s.real(), im = s.imag();
    acc += re * re + im * im;
  }
  return acc / static_cast<double>(signal.samples.size());
}

namespace {

// iterative radix-2 inverse FFT, double precision, scale 1/N
void ifft_inplace(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& x : a) x *= inv;
}

// unit-average-power square QAM with order bits per symbol (2, 4 or 6)
std::complex<double> draw_symbol(Rng& rng, int order) {
  const int axis_bits = order / 2;
  const int levels = 1 << (axis_bits - 1);  // amplitude levels per sign
  const double norm =
      std::sqrt(2.0 * ((std::pow(4.0, axis_bits) - 1.0) / 3.0));
  const uint64_t bits = rng.next_u64();
  auto axis = [&](int shift) {
    const uint64_t v = (bits >> shift) & ((1u << axis_bits) - 1);
    const double mag = 2.0 * static_cast<double>(v & (levels - 1)) + 1.0;
    return (v >> (axis_bits - 1)) ? mag : -mag;
  };
  return {axis(0) / norm, axis(axis_bits) / norm};
}

struct Resampler {
  int up = 1;
  int down = 1;
  int taps_per_phase = 0;
  std::vector<double> taps;  // length up * taps_per_phase

  static Resampler design(double in_rate, double out_rate) {
    Resampler r;
    const auto in_i = static_cast<long long>(std::llround(in_rate));
    const auto out_i = static_cast<long long>(std::llround(out_rate));
    const long long g = std::gcd(in_i, out_i);
    r.up = static_cast<int>(out_i / g);
    r.down = static_cast<int>(in_i / g);
    if (r.up == r.down) return r;
    r.taps_per_phase = 16;
    const int len = r.up * r.taps_per_phase;
    const double fc = 0.5 * std::min(in_rate, out_rate) / (in_rate * r.up);
    r.taps.resize(len);
    const double m = 0.5 * (len - 1);
    for (int i = 0; i < len; ++i) {
      const double x = 2.0 * fc * (i - m);
      const double sinc =
          x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double w = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (len - 1)) +
                       0.08 * std::cos(4.0 * std::numbers::pi * i / (len - 1));
      r.taps[i] = 2.0 * fc * sinc * w * r.up;
    }
    return r;
  }

  bool identity() const { return up == down; }

  // y[n] = sum_j taps[r + j*up] * x[q - j], q = n*down / up, r = n*down % up
  std::complex<double> output_at(const std::vector<std::complex<double>>& x, int64_t n) const {
    const int64_t num = n * down;
    const int64_t q = num / up;
    const int r = static_cast<int>(num % up);
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < taps_per_phase; ++j) {
      const int64_t m = q - j;
      if (m < 0 || m >= static_cast<int64_t>(x.size())) continue;
      acc += taps[static_cast<size_t>(r) + static_cast<size_t>(j) * up] * x[m];
    }
    return acc;
  }
};

}  // namespace

IqBuffer generate_baseband(const McsEntry& entry, const SignalConfig& cfg, size_t n_samples,
                           uint64_t seed) {
  cfg.validate();
  if (n_samples == 0) throw ValidationError("generate_baseband: n_samples must be positive");
  if (entry.modulation_order != 2 && entry.modulation_order != 4 && entry.modulation_order != 6)
    throw ValidationError("generate_baseband: unsupported modulation order " +
                          std::to_string(entry.modulation_order));

  const int n_sc = cfg.n_subcarriers();
  const int fft = cfg.fft_size;
  const int sym_len = fft + cfg.cyclic_prefix_len;
  Rng rng(derive_seed(seed, {0x77617665}));  // "wave"

  const Resampler rs = Resampler::design(cfg.ofdm_rate_hz(), cfg.sample_rate_hz);
  // transient skipped at the output so every emitted sample sees a full
  // filter history
  const size_t skip = rs.identity()
                          ? 0
                          : static_cast<size_t>((static_cast<int64_t>(rs.taps_per_phase) * rs.up +
                                                 rs.down - 1) /
                                                    rs.down +
                                                1);
  const size_t need_out = n_samples + skip;
  const size_t need_in =
      rs.identity() ? need_out
                    : static_cast<size_t>(need_out * static_cast<uint64_t>(rs.down) / rs.up + 2);
  const size_t n_symbols = (need_in + sym_len - 1) / sym_len;

  std::vector<std::complex<double>> stream;
  stream.reserve(n_symbols * sym_len);
  std::vector<std::complex<double>> grid(fft);
  for (size_t s = 0; s < n_symbols; ++s) {
    std::fill(grid.begin(), grid.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < n_sc; ++i) {
      int sc = i - n_sc / 2;
      if (sc >= 0) sc += 1;  // skip DC
      const int bin = sc >= 0 ? sc : fft + sc;
      grid[bin] = draw_symbol(rng, entry.modulation_order);
    }
    ifft_inplace(grid);
    for (int i = fft - cfg.cyclic_prefix_len; i < fft; ++i) stream.push_back(grid[i]);
    stream.insert(stream.end(), grid.begin(), grid.end());
  }

  std::vector<std::complex<double>> out(n_samples);
  if (rs.identity()) {
    for (size_t i = 0; i < n_samples; ++i) out[i] = stream[i];
  } else {
    for (size_t i = 0; i < n_samples; ++i)
      out[i] = rs.output_at(stream, static_cast<int64_t>(i + skip));
  }

  double power = 0.0;
  for (const auto& s : out) power += std::norm(s);
  power /= static_cast<double>(n_samples);
  const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;

  IqBuffer buf;
  buf.samples.resize(n_samples);
  for (size_t i = 0; i < n_samples; ++i)
    buf.samples[i] = std::complex<float>(static_cast<float>(out[i].real() * scale),
                                         static_cast<float>(out[i].imag() * scale));
  return buf;
}

IqBuffer apply_awgn(const IqBuffer& signal, double sinr_db, uint64_t seed) {
  if (signal.samples.empty()) throw ValidationError("apply_awgn: empty buffer");
  IqBuffer out;
  out.samples = signal.samples;
  if (std::isinf(sinr_db) && sinr_db > 0.0) return out;  // noise disabled
  const double p_sig = measure_power(signal);
  const double sigma2 = p_sig * std::pow(10.0, -sinr_db / 10.0);
  const double s = std::sqrt(sigma2 / 2.0);
  Rng rng(derive_seed(seed, {0x6e6f697365}));  // "noise"
  for (auto& v : out.samples) {
    const double ni = s * rng.gaussian();
    const double nq = s * rng.gaussian();
    v = std::complex<float>(static_cast<float>(v.real() + ni),
                            static_cast<float>(v.imag() + nq));
  }
  return out;
}

}  // namespace mcsloc
