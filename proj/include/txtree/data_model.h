#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace txtree {

// Internal patient handle: position in Dataset::episodes.
using Patient = int;

class Parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Screen {
  int day = 0;
  bool positive = false;

  friend bool operator==(const Screen&, const Screen&) = default;
};

struct EpisodeRecord {
  std::string patient_id;
  int admit_day = 0;
  int discharge_day = 0;
  std::vector<Screen> screens;  // sorted by day

  auto length() const -> int { return discharge_day - admit_day + 1; }
  auto present(int day) const -> bool { return admit_day <= day && day <= discharge_day; }
};

struct IsolateRecord {
  std::string isolate_id;
  Patient host = -1;
  int sample_day = 0;
};

// Symmetric, zero-diagonal matrix of SNP distances between sequenced isolates.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(int size) : size_{size}, entries_(static_cast<size_t>(size) * size, 0) {}

  auto size() const -> int { return size_; }
  auto at(int a, int b) const -> int { return entries_[static_cast<size_t>(a) * size_ + b]; }
  void set(int a, int b, int snps) {
    entries_[static_cast<size_t>(a) * size_ + b] = snps;
    entries_[static_cast<size_t>(b) * size_ + a] = snps;
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  int size_ = 0;
  std::vector<int> entries_;
};

struct Dataset {
  std::vector<EpisodeRecord> episodes;
  std::vector<IsolateRecord> isolates;
  DistanceMatrix distances;
  int first_day = 0;
  int last_day = -1;

  // Derived by finalize().
  std::vector<int> first_positive_day;                 // kNoPositive if none
  std::vector<std::vector<int>> isolates_of_patient;   // isolate indices per host
  std::unordered_map<std::string, Patient> patient_index;

  static constexpr int kNoPositive = std::numeric_limits<int>::max();

  auto num_patients() const -> int { return static_cast<int>(episodes.size()); }
  auto num_isolates() const -> int { return static_cast<int>(isolates.size()); }
  auto num_days() const -> int { return last_day - first_day + 1; }
  auto has_positive(Patient j) const -> bool { return first_positive_day[j] != kNoPositive; }
  auto is_sequenced(Patient j) const -> bool { return !isolates_of_patient[j].empty(); }

  // Checks every cross-record invariant, sorts screens and fills derived fields.
  // Throws Validation_error naming the offending record.
  void finalize();
};

auto load_dataset(const std::filesystem::path& episodes_path,
                  const std::filesystem::path& screens_path,
                  const std::filesystem::path& isolates_path,
                  const std::filesystem::path& distances_path) -> Dataset;

// Convenience: the four canonical file names inside one directory.
auto load_dataset_dir(const std::filesystem::path& dir) -> Dataset;

enum class Distance_layout { dense, sparse };

// Canonical output: episodes in dataset order, screens sorted by (patient, day),
// isolates in dataset order, distances dense unless sparse is requested.
void write_dataset(const Dataset& d, const std::filesystem::path& dir,
                   Distance_layout layout = Distance_layout::dense);

auto observed_positive_set(const Dataset& d) -> std::vector<std::string>;

// Minimal CSV reader: header row required, comma separated, no quoting.
struct Csv_table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};
auto read_csv(const std::filesystem::path& path) -> Csv_table;

}  // namespace txtree
