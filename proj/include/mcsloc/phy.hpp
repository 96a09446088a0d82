#pragma once

// MCS table and synthetic baseband generation: random payload bits are
// mapped to constellation symbols, placed on the occupied subcarriers of
// an OFDM grid, transformed with an inverse FFT plus cyclic prefix, and
// rationally resampled to the capture rate. AWGN is added separately so
// the same waveform can be labeled at any SINR.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace mcsloc {

struct McsEntry {
  int index = 0;             // 0..31
  int modulation_order = 2;  // bits per symbol: 2 (QPSK), 4 (16QAM), 6 (64QAM)
  double code_rate = 0.5;    // in (0,1); affects payload bit budget only
};

// 32-entry table; the built-in default transcribes the public LTE uplink
// index-to-modulation mapping with effective code rates for a 6-PRB
// allocation. Can be overridden from a text file of
// "index,modulation_order,code_rate" lines ('#' comments allowed).
class McsTable {
 public:
  static McsTable lte_default();
  static McsTable from_file(const std::filesystem::path& path);

  const McsEntry& lookup(int index) const;  // ValidationError if out of [0,31]

  const std::vector<McsEntry>& entries() const { return entries_; }

 private:
  void validate() const;
  std::vector<McsEntry> entries_;
};

struct SignalConfig {
  double sample_rate_hz = 5'000'000.0;
  double occupied_bandwidth_hz = 1'400'000.0;
  int n_resource_blocks = 6;
  double subcarrier_spacing_hz = 15'000.0;
  int fft_size = 128;          // power of two
  int cyclic_prefix_len = 9;   // samples at the FFT rate

  void validate() const;
  double ofdm_rate_hz() const { return fft_size * subcarrier_spacing_hz; }
  int n_subcarriers() const { return 12 * n_resource_blocks; }
};

struct IqBuffer {
  std::vector<std::complex<float>> samples;

  size_t size() const { return samples.size(); }
};

// (1/L) * sum |s_i|^2. ValidationError on an empty buffer.
double measure_power(const IqBuffer& signal);

// Deterministic given (entry, cfg, n_samples, seed); mean power 1.0 +- 1e-3.
IqBuffer generate_baseband(const McsEntry& entry, const SignalConfig& cfg, size_t n_samples,
                           uint64_t seed);

// output[i] = signal[i] + n[i], n ~ CN(0, P_sig * 10^(-sinr/10)) measured
// against the actual signal power. +inf disables noise (bit-exact copy).
IqBuffer apply_awgn(const IqBuffer& signal, double sinr_db, uint64_t seed);

}  // namespace mcsloc
