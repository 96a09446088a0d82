#pragma once

// Recording persistence in the capture layout (interleaved I,Q as
// little-endian binary32, no header, JSON sidecar for metadata), window
// extraction and the train/validation split.

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "mcsloc/phy.hpp"

namespace mcsloc {

struct RecordingMeta {
  int mcs = 8;
  double sinr_db = 0.0;
  int file_index = 0;
  uint64_t seed = 0;
  double sample_rate_hz = 5'000'000.0;
  uint64_t n_samples = 0;
};

struct DatasetSpec {
  std::vector<int> mcs_values;      // default 8..16
  std::vector<double> sinr_grid_db; // default 0..20 step 1
  int files_per_tuple = 10;
  uint64_t samples_per_file = 523776;
  int window_len = 2048;
  int windows_per_recording = 1000;
  int val_files_per_tuple = 1;

  DatasetSpec();
  void validate() const;
  int n_classes() const { return static_cast<int>(mcs_values.size()); }
  // class id of an MCS value (position in mcs_values); ValidationError if absent
  int label_of(int mcs) const;
};

struct ExampleWindow {
  std::vector<float> data;  // [2][window_len], channel 0 = I, channel 1 = Q
  int label = 0;
};

// Scales so the RMS over both channels is 1 (no-op for an all-zero window).
void normalize_window_rms(std::vector<float>& data);

// payload at `path` (2 * n_samples LE binary32), sidecar at path + ".meta.json"
void write_recording(const IqBuffer& buffer, const RecordingMeta& meta,
                     const std::filesystem::path& path);
std::pair<IqBuffer, RecordingMeta> read_recording(const std::filesystem::path& path);

// windows_per_recording windows, offsets uniform on [0, len - window_len],
// RMS-normalized, label = position of meta.mcs in spec.mcs_values.
std::vector<ExampleWindow> extract_windows(const IqBuffer& rec, const RecordingMeta& meta,
                                           const DatasetSpec& spec, uint64_t seed);

struct SplitResult {
  std::vector<RecordingMeta> train;
  std::vector<RecordingMeta> val;
};

// Per (mcs, sinr) tuple the highest val_files_per_tuple file indices go to
// validation. Pure function; ValidationError on missing/duplicate indices.
SplitResult build_splits(const std::vector<RecordingMeta>& metas, const DatasetSpec& spec);

}  // namespace mcsloc
