#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "txtree/data_model.h"
#include "txtree/priors.h"
#include "txtree/random.h"
#include "txtree/state.h"

namespace txtree {

enum class Move_kind { change_route, add, remove, change_phantom };
inline constexpr int kNumMoveKinds = 4;

auto to_string(Move_kind kind) -> std::string_view;

struct Move_settings {
  Genetic_model model = Genetic_model::transmission_diversity;
  double w = 0.3;        // probability of proposing an importation
  double w_prime = 0.5;  // probability that a proposed importation joins an existing group
  bool full_augmentation = false;
  double phantom_gamma = 0.2;     // m: proposal pmf for distances within a group / chain
  double phantom_gamma_G = 0.01;  // m_G: proposal pmf for distances across groups / chains

  auto grouped() const -> bool { return model == Genetic_model::importation_structure; }
};

// A structural proposal. An empty state means the move was rejected outright (for example an
// acquisition on a day with no available source).
struct Proposal {
  Move_kind kind = Move_kind::change_route;
  Patient patient = -1;
  std::optional<AugmentedState> state;
  double log_q_ratio = 0.0;  // log q(T | T*) − log q(T* | T)
};

// ---- The colonization configuration of a single patient, as seen by the proposal ----

enum class Route_kind { acquisition, new_group_importation, clustered_importation };

struct Route_choice {
  Route_kind kind = Route_kind::new_group_importation;
  int window = 0;           // acquisition: number of candidate days (l_j − t^a_j + 1 or episode length)
  int sources = 0;          // acquisition: available sources on the colonization day
  int group_members = 0;    // clustered: members of the chosen group among the cluster pool
  int cluster_pool = 0;     // clustered: |Y_ext(t^a_j)|
};

struct Route_weights {
  double w = 0.3;
  double w_prime = 0.5;
  bool grouped = false;
};

// Log probability that the route-drawing step produces exactly this configuration.
auto route_log_prob(const Route_choice& route, const Route_weights& weights) -> double;

auto change_route_log_q(const Route_choice& from, const Route_choice& to,
                        const Route_weights& weights) -> double;

// `negatives_before`: uncolonized patients without positive screens in T; `removable_after`:
// removable patients in T*; `log_m`: log M_a of the drawn phantom row (0 when off).
auto add_log_q(int negatives_before, int removable_after, const Route_choice& added,
               const Route_weights& weights, double log_m) -> double;

auto remove_log_q(int removable_before, int negatives_after, const Route_choice& removed,
                  const Route_weights& weights, double log_m) -> double;

// ---- Pools used by the moves ----

// Uncolonized patients with no positive screen (v_s − v_a).
auto negative_patients(const AugmentedState& state) -> std::vector<Patient>;
// Sampler-added colonizations with no offspring (v_0).
auto removable_patients(const AugmentedState& state) -> std::vector<Patient>;
// Colonized, positive, unsequenced patients (v_n).
auto phantom_patients(const AugmentedState& state) -> std::vector<Patient>;
// Importations admitted strictly before patient j (Y_ext(t^a_j)).
auto cluster_pool(const AugmentedState& state, Patient j) -> std::vector<Patient>;
// Patients other than j able to transmit on `day`.
auto available_sources(const AugmentedState& state, Patient j, int day) -> std::vector<Patient>;

// The configuration j currently has, described as the route-drawing step would produce it.
auto current_route(const AugmentedState& state, Patient j, const Route_weights& weights)
    -> Route_choice;

auto applicable_moves(const AugmentedState& state, const Move_settings& settings)
    -> std::vector<Move_kind>;

// Log probability of j's phantom row under m / m_G given the relationships in `state`.
auto phantom_row_log_prob(const AugmentedState& state, Patient j, const Move_settings& settings)
    -> double;

// Draws a fresh phantom row for j into state.phantoms and returns its log probability.
auto draw_phantom_row(AugmentedState& state, Patient j, const Move_settings& settings, Rng& rng)
    -> double;

auto move_change_route(const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal;
auto move_add(const AugmentedState& state, const Move_settings& settings, Rng& rng) -> Proposal;
auto move_remove(const AugmentedState& state, const Move_settings& settings, Rng& rng) -> Proposal;
auto move_change_phantom(const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal;

auto propose(Move_kind kind, const AugmentedState& state, const Move_settings& settings, Rng& rng)
    -> Proposal;

}  // namespace txtree
