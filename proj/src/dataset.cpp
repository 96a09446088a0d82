#include "mcsloc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "mcsloc/binio.hpp"
#include "mcsloc/errors.hpp"
#include "mcsloc/rng.hpp"
#include "nlohmann/json.hpp"

namespace mcsloc {

DatasetSpec::DatasetSpec() {
  for (int m = 8; m <= 16; ++m) mcs_values.push_back(m);
  for (int s = 0; s <= 20; ++s) sinr_grid_db.push_back(static_cast<double>(s));
}

void DatasetSpec::validate() const {
  if (mcs_values.empty()) throw ValidationError("dataset: mcs_values must be non-empty");
  for (int m : mcs_values)
    if (m < 0 || m > 31)
      throw ValidationError("dataset: MCS " + std::to_string(m) + " out of [0,31]");
  if (sinr_grid_db.empty()) throw ValidationError("dataset: sinr_grid_db must be non-empty");
  if (files_per_tuple < 1) throw ValidationError("dataset: files_per_tuple must be >= 1");
  if (window_len < 1 || static_cast<uint64_t>(window_len) > samples_per_file)
    throw ValidationError("dataset: window_len must lie in [1, samples_per_file]");
  if (windows_per_recording < 1)
    throw ValidationError("dataset: windows_per_recording must be >= 1");
  if (val_files_per_tuple < 0 || val_files_per_tuple >= files_per_tuple)
    throw ValidationError("dataset: val_files_per_tuple must be < files_per_tuple");
}

int DatasetSpec::label_of(int mcs) const {
  const auto it = std::find(mcs_values.begin(), mcs_values.end(), mcs);
  if (it == mcs_values.end())
    throw ValidationError("MCS " + std::to_string(mcs) + " is not in the configured class set");
  return static_cast<int>(it - mcs_values.begin());
}

void normalize_window_rms(std::vector<float>& data) {
  double acc = 0.0;
  for (float v : data) acc += static_cast<double>(v) * v;
  if (acc <= 0.0) return;
  const float scale = static_cast<float>(1.0 / std::sqrt(acc / static_cast<double>(data.size())));
  for (auto& v : data) v *= scale;
}

namespace {

nlohmann::ordered_json meta_to_json(const RecordingMeta& m) {
  nlohmann::ordered_json j;
  j["mcs"] = m.mcs;
  j["sinr_db"] = m.sinr_db;
  j["file_index"] = m.file_index;
  j["seed"] = m.seed;
  j["sample_rate_hz"] = m.sample_rate_hz;
  j["n_samples"] = m.n_samples;
  return j;
}

RecordingMeta meta_from_json(const nlohmann::json& j) {
  RecordingMeta m;
  m.mcs = j.at("mcs").get<int>();
  m.sinr_db = j.at("sinr_db").get<double>();
  m.file_index = j.at("file_index").get<int>();
  m.seed = j.at("seed").get<uint64_t>();
  m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  m.n_samples = j.at("n_samples").get<uint64_t>();
  return m;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

}  // namespace

void write_recording(const IqBuffer& buffer, const RecordingMeta& meta,
                     const std::filesystem::path& path) {
  if (buffer.size() != meta.n_samples)
    throw ValidationError("write_recording: buffer length " + std::to_string(buffer.size()) +
                          " does not match meta.n_samples " + std::to_string(meta.n_samples));
  std::string payload;
  payload.reserve(buffer.size() * 8);
  for (const auto& s : buffer.samples) {
    binio::put_f32(payload, s.real());
    binio::put_f32(payload, s.imag());
  }
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + path.string());
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!f) throw FormatError("short write: " + path.string());
  }
  {
    std::ofstream f(sidecar_path(path), std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + sidecar_path(path).string());
    f << meta_to_json(meta).dump(2) << "\n";
    if (!f) throw FormatError("short write: " + sidecar_path(path).string());
  }
}

std::pair<IqBuffer, RecordingMeta> read_recording(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open recording: " + path.string());
  std::string payload((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (payload.size() % 8 != 0)
    throw FormatError("recording " + path.string() + " has " + std::to_string(payload.size()) +
                      " bytes, not divisible by 8");
  std::ifstream mf(sidecar_path(path));
  if (!mf) throw FormatError("missing sidecar: " + sidecar_path(path).string());
  RecordingMeta meta;
  try {
    meta = meta_from_json(nlohmann::json::parse(mf));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad sidecar " + sidecar_path(path).string() + ": " + e.what());
  }
  IqBuffer buf;
  const size_t n = payload.size() / 8;
  buf.samples.resize(n);
  const uint8_t* p = reinterpret_cast<const uint8_t*>(payload.data());
  for (size_t i = 0; i < n; ++i) {
    const float re = binio::get_f32(p + i * 8);
    const float im = binio::get_f32(p + i * 8 + 4);
    if (!std::isfinite(re) || !std::isfinite(im))
      throw ValidationError("recording " + path.string() + " contains non-finite sample at " +
                            std::to_string(i));
    buf.samples[i] = {re, im};
  }
  if (meta.n_samples != n)
    throw FormatError("recording " + path.string() + " payload has " + std::to_string(n) +
                      " samples but sidecar says " + std::to_string(meta.n_samples));
  return {std::move(buf), meta};
}

std::vector<ExampleWindow> extract_windows(const IqBuffer& rec, const RecordingMeta& meta,
                                           const DatasetSpec& spec, uint64_t seed) {
  spec.validate();
  const int L = spec.window_len;
  if (rec.size() < static_cast<size_t>(L))
    throw ValidationError("extract_windows: recording of " + std::to_string(rec.size()) +
                          " samples is shorter than window_len " + std::to_string(L));
  const int label = spec.label_of(meta.mcs);
  const uint64_t range = rec.size() - static_cast<size_t>(L) + 1;
  Rng rng(derive_seed(seed, {0x77696e}));  // "win"
  std::vector<ExampleWindow> out;
  out.reserve(spec.windows_per_recording);
  for (int w = 0; w < spec.windows_per_recording; ++w) {
    const size_t start = static_cast<size_t>(rng.below(range));
    ExampleWindow ew;
    ew.label = label;
    ew.data.resize(2 * static_cast<size_t>(L));
    for (int t = 0; t < L; ++t) {
      ew.data[t] = rec.samples[start + t].real();
      ew.data[static_cast<size_t>(L) + t] = rec.samples[start + t].imag();
    }
    normalize_window_rms(ew.data);
    out.push_back(std::move(ew));
  }
  return out;
}

SplitResult build_splits(const std::vector<RecordingMeta>& metas, const DatasetSpec& spec) {
  spec.validate();
  std::map<std::pair<int, double>, std::vector<const RecordingMeta*>> tuples;
  for (const auto& m : metas) tuples[{m.mcs, m.sinr_db}].push_back(&m);
  SplitResult out;
  for (auto& [key, recs] : tuples) {
    const std::string tuple_name =
        "(mcs=" + std::to_string(key.first) + ", sinr=" + std::to_string(key.second) + ")";
    if (static_cast<int>(recs.size()) != spec.files_per_tuple)
      throw ValidationError("tuple " + tuple_name + " has " + std::to_string(recs.size()) +
                            " recordings, expected " + std::to_string(spec.files_per_tuple));
    std::sort(recs.begin(), recs.end(),
              [](const RecordingMeta* a, const RecordingMeta* b) {
                return a->file_index < b->file_index;
              });
    for (int i = 0; i < spec.files_per_tuple; ++i) {
      if (recs[i]->file_index != i)
        throw ValidationError("tuple " + tuple_name + " has missing or duplicate file_index " +
                              std::to_string(i));
      if (i < spec.files_per_tuple - spec.val_files_per_tuple)
        out.train.push_back(*recs[i]);
      else
        out.val.push_back(*recs[i]);
    }
  }
  return out;
}

}  // namespace mcsloc
