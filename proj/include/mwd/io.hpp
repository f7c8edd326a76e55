#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mwd/features.hpp"
#include "mwd/signal.hpp"

namespace mwd {

// Dataset layout on disk:
//   manifest.json             fs, window_s, preprocessing, subject list, provenance
//   <id>_signal.csv           header = channel names, one row per sample (uV)
//   <id>_events.csv           header "time_s,rating"
// Numbers are written with 17 significant digits so values round-trip exactly.

struct Preprocess {
  std::optional<std::array<double, 2>> bandpass;  // {lo_hz, hi_hz}
  int bandpass_order{4};
  std::optional<std::array<std::string, 2>> reference;
};

struct DatasetManifest {
  double fs{0.0};
  double window_s{0.0};
  Preprocess preprocess;
  struct Subject {
    std::string id;
    std::filesystem::path signal;
    std::filesystem::path events;
  };
  std::vector<Subject> subjects;
  std::map<std::string, std::string> provenance;
};

std::string format_number(double v);
double parse_number(const std::string& s, const std::string& context);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);

Recording read_recording(const std::string& subject_id, double fs, const std::filesystem::path& signal_csv,
                         const std::filesystem::path& events_csv);
void write_recording(const Recording& rec, const std::filesystem::path& signal_csv,
                     const std::filesystem::path& events_csv);

// Writes every subject as a back-to-back recording (see to_recordings) with no
// preprocessing recorded, so loading reproduces the epochs exactly.
void save_dataset(const SubjectDataset& ds, const std::filesystem::path& dir);

// Reads the manifest and applies reference -> bandpass -> epoching -> dropping
// of single-class subjects.
SubjectDataset load_dataset(const std::filesystem::path& manifest_path);

// Feature matrix CSV: header "subject,label,<feature names...>".
void write_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

}  // namespace mwd
