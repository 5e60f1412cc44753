#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/random.h"

namespace txtree_test {

// A synthetic ward of 1108 admissions over 450 days with 20 carriers, of which 18 have a
// sequenced isolate; the other two positives carry no sequence data.
inline auto large_ward(std::uint64_t seed = 654) -> txtree::Dataset {
  constexpr auto kPatients = 1108;
  constexpr auto kDays = 450;
  constexpr auto kPositives = 20;
  constexpr auto kSequenced = 18;

  auto rng = txtree::Rng{seed};
  auto d = txtree::Dataset{};
  for (auto j = 0; j < kPatients; ++j) {
    auto admit = rng.uniform_int(0, kDays - 8);
    auto stay = std::min(kDays - 1 - admit, rng.poisson(7.0));
    auto e = txtree::EpisodeRecord{"P" + std::to_string(j + 1), admit, admit + stay, {}};
    for (auto t = admit; t <= e.discharge_day; t += 3) e.screens.push_back({t, false});
    d.episodes.push_back(std::move(e));
  }
  // Episode 0 is stretched so the range starts on day 0 and ends on the final day.
  d.episodes[0].admit_day = 0;
  d.episodes[1].discharge_day = kDays - 1;

  // Carriers are spread through the record; each turns positive at its last screen.
  auto carriers = std::vector<int>{};
  for (auto i = 0; i < kPositives; ++i) carriers.push_back(3 + i * (kPatients / kPositives));
  for (auto j : carriers) {
    auto& e = d.episodes[j];
    e.screens.back().positive = true;
  }
  for (auto i = 0; i < kSequenced; ++i) {
    const auto& e = d.episodes[carriers[i]];
    d.isolates.push_back({"X" + std::to_string(i + 1), carriers[i], e.screens.back().day});
  }
  // The first half form a tight cluster; the rest are unrelated background strains.
  d.distances = txtree::DistanceMatrix{kSequenced};
  for (auto a = 0; a < kSequenced; ++a) {
    for (auto b = a + 1; b < kSequenced; ++b) {
      auto related = a < kSequenced / 2 && b < kSequenced / 2;
      d.distances.set(a, b, related ? rng.geometric(0.25) : 20 + rng.geometric(0.05));
    }
  }
  d.finalize();
  return d;
}

}  // namespace txtree_test
