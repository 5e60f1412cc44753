#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "txtree/data_model.h"

namespace txtree_test {

struct Episode_spec {
  std::string id;
  int admit;
  int discharge;
  std::vector<std::pair<int, bool>> screens;  // (day, positive)
};

struct Isolate_spec {
  std::string id;
  std::string patient;
  int day;
};

// Builds and finalizes a dataset; `distances` is row-major over the isolates (may be empty).
inline auto make_dataset(const std::vector<Episode_spec>& episodes,
                         const std::vector<Isolate_spec>& isolates = {},
                         const std::vector<std::vector<int>>& distances = {}) -> txtree::Dataset {
  auto d = txtree::Dataset{};
  d.first_day = episodes.empty() ? 0 : episodes.front().admit;
  d.last_day = d.first_day;
  for (const auto& e : episodes) {
    auto rec = txtree::EpisodeRecord{e.id, e.admit, e.discharge, {}};
    for (auto [day, pos] : e.screens) rec.screens.push_back({day, pos});
    d.first_day = std::min(d.first_day, e.admit);
    d.last_day = std::max(d.last_day, e.discharge);
    d.episodes.push_back(std::move(rec));
  }
  auto find = [&](const std::string& id) {
    for (auto j = 0; j < d.num_patients(); ++j) {
      if (d.episodes[j].patient_id == id) return j;
    }
    throw std::invalid_argument{"unknown patient " + id};
  };
  for (const auto& x : isolates) d.isolates.push_back({x.id, find(x.patient), x.day});
  d.distances = txtree::DistanceMatrix{d.num_isolates()};
  for (auto a = 0; a < d.num_isolates(); ++a) {
    for (auto b = a + 1; b < d.num_isolates(); ++b) d.distances.set(a, b, distances[a][b]);
  }
  d.finalize();
  return d;
}

}  // namespace txtree_test
