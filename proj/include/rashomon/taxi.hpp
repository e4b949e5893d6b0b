#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rashomon/model.hpp"

namespace rashomon::taxi {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Taxi world parameters. Defaults give a desk-scale model (a few tens of
// thousands of states).
struct TaxiParams {
  int width = 4;
  int height = 4;
  int fuel_capacity = 14;
  int num_jobs = 5;
  std::array<Cell, 4> depots{{{0, 0}, {3, 0}, {0, 3}, {3, 3}}};
  int first_passenger_loc = 1;
  int first_passenger_dest = 2;
  Cell taxi_start{0, 0};
  std::size_t state_cap = 2'000'000;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

enum Action : ActionIndex { north = 0, east, south, west, pick_up, drop };
inline constexpr std::size_t kNumActions = 6;

// Feature order of a taxi state.
enum Feature : std::size_t {
  x = 0,
  y,
  passenger_loc_x,
  passenger_loc_y,
  passenger_dest_x,
  passenger_dest_y,
  fuel,
  on_board,
  jobs_done,
  done,
};
inline constexpr std::size_t kNumFeatures = 10;

const std::vector<std::string>& action_names();
ActionIndex action_from_name(std::string_view name);  // throws SemanticError

FeatureSchema schema(const TaxiParams& p);
StateVector initial_state(const TaxiParams& p);

using Distribution = std::vector<std::pair<StateVector, double>>;

// Dynamics of one action. Movement is deterministic and costs one fuel (a
// wall bump leaves the position unchanged but still costs fuel); reaching
// fuel 0 ends the episode. pick_up and drop are free; when they do not apply
// they leave the state unchanged. A non-final drop refuels the taxi and
// spawns the next passenger uniformly over the 12 ordered depot pairs with
// distinct pickup and destination.
Distribution successor_distribution(std::span<const int> s, ActionIndex a, const TaxiParams& p);
Distribution successor_distribution(std::span<const int> s, std::string_view action, const TaxiParams& p);

// Exhaustive reachable-state construction from the initial state.
// Throws ResourceError when more than p.state_cap states are reachable.
ExplicitMdp build_taxi(const TaxiParams& p);

// Property text for "all jobs completed".
std::string completion_property(int num_jobs);

}  // namespace rashomon::taxi
