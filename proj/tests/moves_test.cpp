#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support/builders.h"
#include "txtree/moves.h"
#include "txtree/simulate.h"

namespace txtree {

using txtree_test::make_dataset;

constexpr auto kTol = 1e-12;

const auto kFlat = Route_weights{0.3, 0.5, false};
const auto kGrouped = Route_weights{0.3, 0.5, true};

auto acquisition(int window, int sources) -> Route_choice {
  return {Route_kind::acquisition, window, sources, 0, 0};
}
auto new_group() -> Route_choice { return {Route_kind::new_group_importation, 0, 0, 0, 0}; }

TEST(Change_route_ratio, acquisition_to_acquisition) {
  EXPECT_NEAR(std::exp(change_route_log_q(acquisition(6, 4), acquisition(6, 2), kFlat)), 0.5,
              kTol);
}

TEST(Change_route_ratio, importation_to_importation) {
  EXPECT_NEAR(change_route_log_q(new_group(), new_group(), kGrouped), 0.0, kTol);
  EXPECT_NEAR(change_route_log_q(new_group(), new_group(), kFlat), 0.0, kTol);
}

TEST(Change_route_ratio, acquisition_to_unclustered_importation) {
  EXPECT_NEAR(std::exp(change_route_log_q(acquisition(6, 2), new_group(), kGrouped)),
              0.7 / (0.3 * 0.5 * 6 * 2), 1e-12);
  EXPECT_NEAR(std::exp(change_route_log_q(acquisition(6, 2), new_group(), kGrouped)),
              0.3888888888888889, 1e-12);
}

TEST(Change_route_ratio, clustered_terms) {
  auto clustered = Route_choice{Route_kind::clustered_importation, 0, 0, 2, 5};
  // (w w′ n_g / |Y|) / ((1 − w) / (window C))
  EXPECT_NEAR(std::exp(change_route_log_q(clustered, acquisition(3, 2), kGrouped)),
              (0.3 * 0.5 * 2 / 5) / (0.7 / 6), 1e-12);
  EXPECT_NEAR(std::exp(change_route_log_q(clustered, new_group(), kGrouped)), 2.0 / 5.0, 1e-12);
}

TEST(Add_ratio, acquisition) {
  EXPECT_NEAR(std::exp(add_log_q(10, 3, acquisition(5, 2), kFlat, 0.0)), 10.0 * 5 * 2 / (0.7 * 3),
              1e-9);
  EXPECT_NEAR(std::exp(add_log_q(10, 3, acquisition(5, 2), kFlat, 0.0)), 47.62, 5e-3);
}

TEST(Add_ratio, unclustered_importation) {
  EXPECT_NEAR(std::exp(add_log_q(4, 2, new_group(), kGrouped, 0.0)), 13.333333333333334, 1e-9);
}

TEST(Remove_ratio, acquisition) {
  EXPECT_NEAR(std::exp(remove_log_q(2, 11, acquisition(5, 1), kFlat, 0.0)), 2 * 0.7 / (5 * 11.0),
              1e-12);
  EXPECT_NEAR(std::exp(remove_log_q(2, 11, acquisition(5, 1), kFlat, 0.0)), 0.02545, 5e-6);
}

TEST(Add_remove_ratio, product_is_one_in_identical_surroundings) {
  for (auto route : {acquisition(5, 2), new_group(),
                     Route_choice{Route_kind::clustered_importation, 0, 0, 3, 4}}) {
    auto log_m = std::log(0.037);
    EXPECT_NEAR(add_log_q(9, 3, route, kGrouped, log_m) + remove_log_q(3, 9, route, kGrouped, log_m),
                0.0, kTol);
  }
}

class Move_test : public testing::Test {
 protected:
  // E arrives first and is positive; F and G are never positive; H is positive but unsequenced.
  Dataset d = make_dataset({{"E", 0, 8, {{0, true}}},
                            {"F", 1, 5, {{1, false}}},
                            {"G", 3, 8, {}},
                            {"H", 2, 8, {{2, false}, {6, true}}}},
                           {{"xe", "E", 0}}, {{0}});
  Move_settings settings;
};

TEST_F(Move_test, clustered_add_without_earlier_importation_rejected) {
  // Only an importation admitted strictly earlier can host the new member; on day 0 nobody is.
  auto e = make_dataset({{"A", 0, 6, {{0, true}}}, {"B", 0, 6, {}}});
  auto s = initial_state(e);
  settings.model = Genetic_model::importation_structure;
  settings.w = 0.999999;
  settings.w_prime = 0.999999;
  auto rng = Rng{5};
  auto p = move_add(s, settings, rng);
  EXPECT_EQ(p.patient, 1);
  EXPECT_FALSE(p.state.has_value());
}

TEST_F(Move_test, acquisition_without_source_rejected) {
  auto e = make_dataset({{"A", 0, 1, {{0, true}}}, {"B", 3, 6, {}}});
  auto s = initial_state(e);
  settings.w = 1e-9;
  auto rng = Rng{5};
  auto p = move_add(s, settings, rng);
  EXPECT_FALSE(p.state.has_value());
}

TEST_F(Move_test, remove_never_picks_a_source) {
  auto s = initial_state(d);
  s.set_acquisition(1, 2, 0, 0);
  s.set_acquisition(2, 4, 1, 0);  // F is now G's source
  EXPECT_EQ(removable_patients(s), (std::vector<Patient>{2}));
  auto rng = Rng{1};
  for (auto i = 0; i < 50; ++i) EXPECT_EQ(move_remove(s, settings, rng).patient, 2);
}

TEST_F(Move_test, phantom_move_scheduled_only_with_full_augmentation) {
  auto s = initial_state(d);
  auto moves = applicable_moves(s, settings);
  EXPECT_EQ(std::count(moves.begin(), moves.end(), Move_kind::change_phantom), 0);
  EXPECT_EQ(std::count(moves.begin(), moves.end(), Move_kind::remove), 0);
  settings.full_augmentation = true;
  moves = applicable_moves(s, settings);
  EXPECT_EQ(std::count(moves.begin(), moves.end(), Move_kind::change_phantom), 1);
}

TEST_F(Move_test, phantom_redraw_ratio) {
  settings.full_augmentation = true;
  settings.phantom_gamma = 0.2;
  auto s = initial_state(d);
  s.set_acquisition(3, 4, 0, 0);  // H shares a chain with the sequenced host
  s.phantoms.set(3, {1}, {});
  EXPECT_NEAR(phantom_row_log_prob(s, 3, settings), std::log(0.2 * 0.8), kTol);
  auto seen_zero = false;
  for (std::uint64_t seed = 1; seed < 200 && !seen_zero; ++seed) {
    auto rng = Rng{seed};
    auto p = move_change_phantom(s, settings, rng);
    ASSERT_TRUE(p.state.has_value());
    auto drawn = p.state->phantoms.to_observed(3)[0];
    if (drawn == 0) {
      seen_zero = true;
      EXPECT_NEAR(std::exp(p.log_q_ratio), 0.8, 1e-12);
    } else if (drawn == 1) {
      EXPECT_NEAR(p.log_q_ratio, 0.0, kTol);
    }
  }
  EXPECT_TRUE(seen_zero);
}

TEST_F(Move_test, phantom_move_is_noop_when_off) {
  auto s = initial_state(d);
  auto rng = Rng{3};
  EXPECT_FALSE(move_change_phantom(s, settings, rng).state.has_value());
}

struct Reversibility_case {
  Genetic_model model;
  bool full_augmentation;
};

class Reversibility_test : public testing::TestWithParam<Reversibility_case> {
 protected:
  auto scenario(std::uint64_t seed) -> SimulatedTruth {
    auto cfg = ScenarioConfig{};
    cfg.n_patients = 60;
    cfg.horizon_days = 30;
    cfg.theta.p = 0.2;
    cfg.theta.beta = 0.03;
    cfg.theta.z = 0.6;
    cfg.model = GetParam().model;
    cfg.seed = seed;
    // Re-run on the same schedule with partial sequencing so some positives lack an isolate.
    auto rng = Rng{seed + 1000};
    return simulate_on_schedule(simulate_outbreak(cfg).dataset, cfg.theta, cfg.model,
                                {Sequencing::Kind::random, 0.5}, rng);
  }
  auto settings() const -> Move_settings {
    auto s = Move_settings{};
    s.model = GetParam().model;
    s.full_augmentation = GetParam().full_augmentation;
    return s;
  }
};

// Walks a random sequence of proposals; every constructed proposal is checked against the
// ratio of its reverse, computed from the proposed state, and accepted with probability 1/2.
TEST_P(Reversibility_test, every_move_composes_with_its_reverse) {
  auto checked = std::array<int, kNumMoveKinds>{};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto truth = scenario(seed);
    const auto& d = truth.dataset;
    auto cfg = settings();
    auto weights = Route_weights{cfg.w, cfg.w_prime, cfg.grouped()};
    auto state = initial_state(d);
    auto rng = Rng{seed * 7};
    if (cfg.full_augmentation) {
      for (auto j : phantom_patients(state)) draw_phantom_row(state, j, cfg, rng);
    }
    for (auto step = 0; step < 3000; ++step) {
      auto moves = applicable_moves(state, cfg);
      ASSERT_FALSE(moves.empty());
      auto kind = moves[rng.uniform_int(0, static_cast<int>(moves.size()) - 1)];
      auto p = propose(kind, state, cfg, rng);
      if (!p.state) continue;
      const auto& next = *p.state;
      auto violations = validate(next, d);
      ASSERT_TRUE(violations.empty()) << to_string(kind) << ": " << violations.front().message;
      auto j = p.patient;
      auto reverse = 0.0;
      switch (kind) {
        case Move_kind::change_route:
          reverse = change_route_log_q(current_route(next, j, weights),
                                       current_route(state, j, weights), weights);
          break;
        case Move_kind::add: {
          auto log_m = cfg.full_augmentation ? phantom_row_log_prob(next, j, cfg) : 0.0;
          reverse = remove_log_q(static_cast<int>(removable_patients(next).size()),
                                 static_cast<int>(negative_patients(state).size()),
                                 current_route(next, j, weights), weights, log_m);
          break;
        }
        case Move_kind::remove: {
          auto log_m = cfg.full_augmentation ? phantom_row_log_prob(state, j, cfg) : 0.0;
          reverse = add_log_q(static_cast<int>(negative_patients(next).size()),
                              static_cast<int>(removable_patients(state).size()),
                              current_route(state, j, weights), weights, log_m);
          break;
        }
        case Move_kind::change_phantom:
          reverse = phantom_row_log_prob(next, j, cfg) - phantom_row_log_prob(state, j, cfg);
          break;
      }
      ASSERT_NEAR(p.log_q_ratio + reverse, 0.0, 1e-9) << to_string(kind) << " step " << step;
      ++checked[static_cast<int>(kind)];
      if (rng.bernoulli(0.5)) state = next;
    }
  }
  EXPECT_GT(checked[0], 0);
  EXPECT_GT(checked[1], 0);
  EXPECT_GT(checked[2], 0);
  if (GetParam().full_augmentation) {
    EXPECT_GT(checked[3], 0);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Settings, Reversibility_test,
    testing::Values(Reversibility_case{Genetic_model::transmission_diversity, false},
                    Reversibility_case{Genetic_model::transmission_diversity, true},
                    Reversibility_case{Genetic_model::importation_structure, false},
                    Reversibility_case{Genetic_model::importation_structure, true}));

}  // namespace txtree
