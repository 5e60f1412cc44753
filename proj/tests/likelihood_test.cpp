#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <algorithm>

#include "support/builders.h"
#include "txtree/likelihood.h"
#include "txtree/simulate.h"

namespace txtree {

using txtree_test::make_dataset;

constexpr auto kTol = 1e-9;
constexpr auto kNegInf = -std::numeric_limits<double>::infinity();

auto params(double p, double z, double beta, double gamma, double gamma_G, double k, double c)
    -> ModelParams {
  return {p, z, beta, gamma, gamma_G, k, c, Distance_family::geometric};
}

TEST(Transmission_log_lik, lone_uncolonized_patient) {
  auto d = make_dataset({{"A", 0, 4, {}}});
  auto s = AugmentedState{d};
  auto theta = ModelParams{};
  theta.p = 0.1;
  EXPECT_NEAR(transmission_log_lik(s, s.census(), d, theta), std::log(0.9), kTol);
}

TEST(Transmission_log_lik, importation_exposes_neighbour) {
  auto d = make_dataset({{"A", 0, 2, {{0, true}}}, {"B", 0, 2, {}}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  auto theta = ModelParams{};
  theta.p = 0.1;
  theta.beta = 0.5;
  EXPECT_NEAR(transmission_log_lik(s, s.census(), d, theta),
              std::log(0.1) + std::log(0.9) - 0.5 * 3, kTol);
}

TEST(Transmission_log_lik, acquisition_without_pressure_impossible) {
  auto d = make_dataset({{"A", 0, 2, {}}, {"B", 3, 6, {}}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  s.set_acquisition(1, 4, 0, 0);  // A left on day 2
  EXPECT_EQ(transmission_log_lik(s, s.census(), d, ModelParams{}), kNegInf);
}

TEST(Screen_counts, importation_two_positives) {
  auto d = make_dataset({{"A", 2, 9, {{2, true}, {5, true}}}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  EXPECT_EQ(screen_counts(s, d), (ScreenCounts{2, 0, 0}));
}

TEST(Screen_counts, detectable_from_colonization_day) {
  auto d = make_dataset({{"S", 0, 12, {}}, {"A", 0, 12, {{4, false}, {6, false}, {9, true}}}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  s.set_acquisition(1, 5, 0, 0);
  EXPECT_EQ(screen_counts(s, d), (ScreenCounts{1, 1, 0}));
}

TEST(Screen_counts, positive_before_colonization) {
  auto d = make_dataset({{"S", 0, 12, {}}, {"A", 0, 12, {{4, true}}}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  s.set_acquisition(1, 5, 0, 0);
  EXPECT_EQ(screen_counts(s, d).fp, 1);
}

TEST(Observation_log_lik, examples) {
  auto theta = ModelParams{};
  theta.z = 0.8;
  EXPECT_NEAR(observation_log_lik({2, 1, 0}, theta), std::log(0.128), kTol);
  EXPECT_EQ(observation_log_lik({2, 1, 1}, theta), kNegInf);
  theta.z = 0.3;
  EXPECT_EQ(observation_log_lik({0, 0, 1}, theta), kNegInf);
  EXPECT_EQ(observation_log_lik({0, 0, 0}, theta), 0.0);
}

TEST(Pair_log_pmf_td, examples) {
  auto theta = params(0.5, 0.5, 0.01, 0.5, 0.05, 0.8, 0.5);
  EXPECT_NEAR(pair_log_pmf_td(0, 0, theta), std::log(0.5), kTol);
  theta.gamma = 0.2;
  EXPECT_NEAR(pair_log_pmf_td(2, 1, theta), std::log(0.112896), kTol);
  EXPECT_NEAR(pair_log_pmf_td(3, kInfinite, theta), std::log(0.05 * std::pow(0.95, 3)), kTol);
}

TEST(Pair_log_pmf_td, parameter_above_one_is_domain_error) {
  auto theta = params(0.5, 0.5, 0.01, 0.8, 0.05, 1.5, 0.5);
  EXPECT_THROW(pair_log_pmf_td(1, 1, theta), Parameter_domain_error);
  EXPECT_NO_THROW(pair_log_pmf_td(1, 0, theta));
}

TEST(Pair_log_pmf_is, examples) {
  auto theta = params(0.5, 0.5, 0.01, 0.22, 1.6e-4, 1.0, 0.5);
  EXPECT_NEAR(pair_log_pmf_is(0, true, theta), std::log(0.22), kTol);
  EXPECT_NEAR(pair_log_pmf_is(5, false, theta), std::log(1.6e-4 * std::pow(1 - 1.6e-4, 5)), kTol);
  theta.gamma = 0.25;
  EXPECT_NEAR(pair_log_pmf_is(3, true, theta), std::log(0.25 * std::pow(0.75, 3)), kTol);
}

TEST(Pair_log_pmf, large_distances_do_not_underflow) {
  auto theta = params(0.5, 0.5, 0.01, 0.999999, 1e-9, 1.0, 0.5);
  auto far = pair_log_pmf_is(100000, false, theta);
  EXPECT_TRUE(std::isfinite(far));
  EXPECT_NEAR(far, std::log(1e-9) + 100000 * std::log1p(-1e-9), 1e-9);
  EXPECT_TRUE(std::isfinite(pair_log_pmf_is(2000, true, theta)));
}

// Chain S -> A -> B with one isolate each, plus a lineage-free importation U.
class Genetic_test : public testing::Test {
 protected:
  Dataset d = make_dataset({{"S", 0, 20, {{0, true}}},
                            {"A", 0, 20, {{6, true}}},
                            {"B", 0, 20, {{12, true}}},
                            {"U", 0, 20, {{0, true}}}},
                           {{"xs", "S", 0}, {"xa", "A", 6}, {"xb", "B", 12}, {"xu", "U", 0}},
                           {{0, 1, 3, 40}, {1, 0, 2, 38}, {3, 2, 0, 41}, {40, 38, 41, 0}});
  AugmentedState s{d};

  void SetUp() override {
    s.set_importation(0, 0);
    s.set_acquisition(1, 3, 0, 0);
    s.set_acquisition(2, 8, 1, 0);
    s.set_importation(3, 3);
  }
};

TEST(Genetic_log_lik_td, at_most_one_isolate) {
  auto d = make_dataset({{"A", 0, 2, {{0, true}}}}, {{"x", "A", 0}}, {{0}});
  auto s = initial_state(d);
  EXPECT_EQ(genetic_log_lik_td(s, d, ModelParams{}), 0.0);
  auto e = make_dataset({{"A", 0, 2, {}}});
  EXPECT_EQ(genetic_log_lik_td(AugmentedState{e}, e, ModelParams{}), 0.0);
}

TEST(Genetic_log_lik_td, direct_pair) {
  auto d = make_dataset({{"A", 0, 9, {{0, true}}}, {"B", 0, 9, {{5, true}}}},
                        {{"xa", "A", 0}, {"xb", "B", 5}}, {{0, 1}, {1, 0}});
  auto s = AugmentedState{d};
  s.set_importation(0, 0);
  s.set_acquisition(1, 2, 0, 0);
  auto theta = params(0.5, 0.5, 0.01, 0.2, 0.05, 0.8, 0.5);
  EXPECT_NEAR(genetic_log_lik_td(s, d, theta), std::log(0.16 * 0.84), kTol);
}

TEST_F(Genetic_test, chain_of_three_sums_pairs) {
  auto theta = params(0.5, 0.5, 0.01, 0.2, 0.05, 0.8, 0.5);
  auto expected = 0.0;
  // Pair tree distances: S-A 1, A-B 1, S-B 2; U is in its own chain.
  auto within = std::vector<std::tuple<int, int>>{{1, 1}, {2, 1}, {3, 2}};
  for (auto [snps, t] : within) {
    auto q = 0.2 * std::pow(0.8, t);
    expected += std::log(q) + snps * std::log1p(-q);
  }
  for (auto snps : {40, 38, 41}) expected += std::log(0.05) + snps * std::log1p(-0.05);
  EXPECT_NEAR(genetic_log_lik_td(s, d, theta), expected, kTol);
}

TEST_F(Genetic_test, k_one_ignores_topology) {
  auto theta = params(0.5, 0.5, 0.01, 0.2, 0.05, 1.0, 0.5);
  auto before = genetic_log_lik_td(s, d, theta);
  s.set_acquisition(2, 8, 0, 0);  // B now infected directly by S
  EXPECT_NEAR(genetic_log_lik_td(s, d, theta), before, kTol);
  theta.k = 0.8;
  EXPECT_GT(std::abs(genetic_log_lik_td(s, d, theta) - before), 1e-6);
}

TEST_F(Genetic_test, single_group_matches_td_with_unit_k) {
  s.set_acquisition(3, 2, 0, 0);
  auto theta = params(0.5, 0.5, 0.01, 0.2, 0.05, 1.0, 0.5);
  EXPECT_NEAR(genetic_log_lik_is(s, d, theta), genetic_log_lik_td(s, d, theta), kTol);
}

TEST(Genetic_log_lik_is, two_singleton_groups) {
  auto d = make_dataset({{"A", 0, 9, {{0, true}}}, {"B", 0, 9, {{0, true}}}},
                        {{"xa", "A", 0}, {"xb", "B", 0}}, {{0, 1000}, {1000, 0}});
  auto s = initial_state(d);
  auto theta = params(0.5, 0.5, 0.01, 0.2, 1.6e-4, 1.0, 0.5);
  EXPECT_NEAR(genetic_log_lik_is(s, d, theta), std::log(1.6e-4) + 1000 * std::log1p(-1.6e-4),
              kTol);
}

TEST(Genetic_log_lik_is, no_isolates) {
  auto d = make_dataset({{"A", 0, 9, {{0, true}}}});
  EXPECT_EQ(genetic_log_lik_is(initial_state(d), d, ModelParams{}), 0.0);
}

TEST(Grouping_log_lik, examples) {
  EXPECT_NEAR(grouping_log_lik(2, 5, 0.2), std::log(0.02048), kTol);
  EXPECT_EQ(grouping_log_lik(0, 0, 0.2), 0.0);
  EXPECT_NEAR(grouping_log_lik(4, 4, 0.5), 4 * std::log(0.5), kTol);
}

TEST(Grouping_log_lik, counts_distinct_founders) {
  auto d = make_dataset({{"A", 0, 9, {{0, true}}}, {"B", 1, 9, {{1, true}}},
                         {"C", 2, 9, {{2, true}}}, {"D", 3, 9, {{3, true}}},
                         {"E", 4, 9, {{4, true}}}});
  auto s = initial_state(d);
  s.set_importation(1, 0);
  s.set_importation(2, 0);
  s.set_importation(4, 3);
  EXPECT_EQ(count_groups(s), 2);
  auto theta = ModelParams{};
  theta.c = 0.2;
  EXPECT_NEAR(grouping_log_lik(s, theta), std::log(0.02048), kTol);
}

// Two patients: A imported on days 0..4, B colonized from A on day 2 and screened twice.
class Total_posterior_test : public testing::Test {
 protected:
  Dataset d = make_dataset({{"A", 0, 4, {{0, true}}}, {"B", 0, 4, {{0, false}, {3, true}}}},
                           {{"xa", "A", 0}, {"xb", "B", 3}}, {{0, 2}, {2, 0}});
  AugmentedState s{d};
  ModelParams theta = params(0.3, 0.7, 0.4, 0.25, 0.05, 0.9, 0.4);
  PriorSpec priors;

  void SetUp() override {
    s.set_importation(0, 0);
    s.set_acquisition(1, 2, 0, 0);
  }
};

TEST_F(Total_posterior_test, matches_hand_product) {
  // Bernoulli: p (1 − p). Escape of B on days 0..1 with C = 1 each, acquisition with C(2) = 1.
  auto transmission = std::log(0.3) + std::log(0.7) - 0.4 * 2 + std::log(1 - std::exp(-0.4));
  // Screens: A positive (TP); B negative before colonization, positive after (TP).
  auto observation = 2 * std::log(0.7);
  auto genetic = std::log(0.25 * 0.9) + 2 * std::log(1 - 0.25 * 0.9);
  auto prior = std::log(1e-6) - 1e-6 * 0.4 + std::log(1e-6) - 1e-6 * 0.9;
  EXPECT_NEAR(total_log_posterior(s, d, theta, Genetic_model::transmission_diversity, priors),
              transmission + observation + genetic + prior, kTol);

  auto grouping = std::log(0.4);
  auto is_genetic = std::log(0.25) + 2 * std::log(0.75);
  auto is_prior = std::log(1e-6) - 1e-6 * 0.4;
  EXPECT_NEAR(total_log_posterior(s, d, theta, Genetic_model::importation_structure, priors),
              transmission + observation + is_genetic + grouping + is_prior, kTol);
}

TEST_F(Total_posterior_test, any_impossible_factor_propagates) {
  s.set_acquisition(1, 4, 0, 0);  // after B's positive screen
  EXPECT_EQ(total_log_posterior(s, d, theta, Genetic_model::transmission_diversity, priors),
            kNegInf);
}

TEST_F(Total_posterior_test, finite_when_all_factors_finite) {
  EXPECT_TRUE(std::isfinite(
      total_log_posterior(s, d, theta, Genetic_model::transmission_diversity, priors)));
}

class Pmf_identity : public testing::TestWithParam<std::tuple<double, Distance_family>> {};

TEST_P(Pmf_identity, normalized_with_matched_mean) {
  auto [q, family] = GetParam();
  auto mean = (1 - q) / q;
  auto ten_means = static_cast<int>(std::ceil(10 * std::max(mean, 1.0)));
  auto partial = std::vector<double>{};
  auto first_moment = 0.0;
  auto mass = 0.0;
  for (auto snps = 0; snps <= 200 * ten_means; ++snps) {
    auto pmf = std::exp(log_pmf(snps, q, family));
    mass += pmf;
    first_moment += snps * pmf;
    partial.push_back(mass);
  }
  // A geometric tail beyond ten means is (1 − q)^{D+1} ≈ e^{−10}, so the 1e−9 level is reached
  // further out; check the exact partial sum there and the limit separately.
  if (family == Distance_family::geometric) {
    EXPECT_NEAR(partial[ten_means], -std::expm1((ten_means + 1) * std::log1p(-q)), 1e-12);
  }
  auto reached = std::find_if(partial.begin(), partial.end(), [](double m) { return m >= 1 - 1e-9; });
  ASSERT_NE(reached, partial.end());
  EXPECT_LE(partial.back(), 1 + 1e-12);
  EXPECT_NEAR(first_moment, mean, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(
    Families, Pmf_identity,
    testing::Combine(testing::Values(0.9, 0.5, 0.2, 0.16, 0.05, 0.01),
                     testing::Values(Distance_family::geometric, Distance_family::poisson)));

auto simulated(std::uint64_t seed, Genetic_model model) -> SimulatedTruth {
  auto cfg = ScenarioConfig{};
  cfg.n_patients = 120;
  cfg.horizon_days = 60;
  cfg.theta.p = 0.1;
  cfg.theta.beta = 0.02;
  cfg.model = model;
  cfg.seed = seed;
  return simulate_outbreak(cfg);
}

TEST(Sufficient_statistics, agree_with_reference_kernels) {
  for (auto model : {Genetic_model::transmission_diversity, Genetic_model::importation_structure}) {
    for (auto family : {Distance_family::geometric, Distance_family::poisson}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto truth = simulated(seed, model);
        auto s = truth.state();
        const auto& d = truth.dataset;
        auto theta = params(0.1, 0.8, 0.02, 0.2, 0.05, 0.8, 0.3);
        theta.distance_family = family;
        auto options = Likelihood_options{model, false, false};
        auto stats = compute_stats(s, Pair_index{d}, options);
        auto reference = transmission_log_lik(s, s.census(), d, theta) +
                         observation_log_lik(screen_counts(s, d), theta);
        if (model == Genetic_model::transmission_diversity) {
          reference += genetic_log_lik_td(s, d, theta);
        } else {
          reference += genetic_log_lik_is(s, d, theta) + grouping_log_lik(s, theta);
        }
        EXPECT_NEAR(log_likelihood(stats, theta, options), reference,
                    1e-9 * std::max(1.0, std::abs(reference)));
        options.data_free = true;
        EXPECT_EQ(log_likelihood(stats, theta, options), 0.0);
      }
    }
  }
}

// Relabels patients by reversing their order.
auto reversed(const Dataset& d, const AugmentedState& s) -> std::pair<Dataset, Truth_tree> {
  auto n = d.num_patients();
  auto map = [n](int j) { return j >= 0 ? n - 1 - j : j; };
  auto out = Dataset{};
  for (auto j = n - 1; j >= 0; --j) out.episodes.push_back(d.episodes[j]);
  for (auto iso : d.isolates) {
    iso.host = map(iso.host);
    out.isolates.push_back(iso);
  }
  out.distances = d.distances;
  out.finalize();
  auto tree = Truth_tree{std::vector<int>(n), std::vector<int>(n), std::vector<int>(n)};
  for (auto j = 0; j < n; ++j) {
    tree.col_day[map(j)] = s.col_day(j);
    tree.source[map(j)] = map(s.source(j));
    tree.group[map(j)] = map(s.group(j));
  }
  return {std::move(out), std::move(tree)};
}

TEST(Total_log_posterior, invariant_under_relabeling) {
  for (auto model : {Genetic_model::transmission_diversity, Genetic_model::importation_structure}) {
    auto truth = simulated(42, model);
    auto s = truth.state();
    auto [d2, tree] = reversed(truth.dataset, s);
    auto relabeled = SimulatedTruth{std::move(d2), std::move(tree)};
    auto s2 = relabeled.state();
    ASSERT_TRUE(validate(s2, relabeled.dataset).empty());
    auto theta = params(0.1, 0.8, 0.02, 0.2, 0.05, 0.8, 0.3);
    auto priors = PriorSpec{};
    auto a = total_log_posterior(s, truth.dataset, theta, model, priors);
    auto b = total_log_posterior(s2, relabeled.dataset, theta, model, priors);
    EXPECT_NEAR(a, b, 1e-9 * std::abs(a));
  }
}

}  // namespace txtree
