#include "rashomon/taxi.hpp"

#include <algorithm>

#include "rashomon/error.hpp"

namespace rashomon::taxi {

namespace {

bool inside(const TaxiParams& p, Cell c) { return c.x >= 0 && c.x < p.width && c.y >= 0 && c.y < p.height; }

}  // namespace

void TaxiParams::validate() const {
  if (width < 1 || height < 1) throw ConfigError("taxi: grid dimensions must be positive");
  if (fuel_capacity < 1) throw ConfigError("taxi: fuel_capacity must be >= 1");
  if (num_jobs < 1) throw ConfigError("taxi: num_jobs must be >= 1");
  for (std::size_t i = 0; i < depots.size(); ++i) {
    if (!inside(*this, depots[i])) throw ConfigError("taxi: depot " + std::to_string(i) + " outside the grid");
    for (std::size_t j = 0; j < i; ++j) {
      if (depots[i] == depots[j]) throw ConfigError("taxi: depots must be distinct");
    }
  }
  auto valid_depot = [](int d) { return d >= 0 && d < 4; };
  if (!valid_depot(first_passenger_loc) || !valid_depot(first_passenger_dest)) {
    throw ConfigError("taxi: first passenger depot index must be in 0..3");
  }
  if (first_passenger_loc == first_passenger_dest) {
    throw ConfigError("taxi: first passenger location and destination must differ");
  }
  if (!inside(*this, taxi_start)) throw ConfigError("taxi: taxi_start outside the grid");
  if (state_cap == 0) throw ConfigError("taxi: state cap must be positive");
}

const std::vector<std::string>& action_names() {
  static const std::vector<std::string> names{"north", "east", "south", "west", "pick_up", "drop"};
  return names;
}

ActionIndex action_from_name(std::string_view name) {
  const auto& names = action_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw SemanticError("unknown taxi action '" + std::string(name) + "'");
  return static_cast<ActionIndex>(it - names.begin());
}

FeatureSchema schema(const TaxiParams& p) {
  const int xmax = p.width - 1;
  const int ymax = p.height - 1;
  return FeatureSchema(
      {"x", "y", "passenger_loc_x", "passenger_loc_y", "passenger_dest_x", "passenger_dest_y", "fuel", "on_board",
       "jobs_done", "done"},
      {{0, xmax}, {0, ymax}, {0, xmax}, {0, ymax}, {0, xmax}, {0, ymax}, {0, p.fuel_capacity}, {0, 1},
       {0, p.num_jobs}, {0, 1}});
}

StateVector initial_state(const TaxiParams& p) {
  const Cell loc = p.depots[p.first_passenger_loc];
  const Cell dest = p.depots[p.first_passenger_dest];
  return {p.taxi_start.x, p.taxi_start.y, loc.x, loc.y, dest.x, dest.y, p.fuel_capacity, 0, 0, 0};
}

Distribution successor_distribution(std::span<const int> s, ActionIndex a, const TaxiParams& p) {
  if (a >= kNumActions) throw SemanticError("unknown taxi action index " + std::to_string(a));
  StateVector next(s.begin(), s.end());
  if (s[done] == 1) return {{std::move(next), 1.0}};

  switch (a) {
    case north:
    case east:
    case south:
    case west: {
      static constexpr int dx[] = {0, 1, 0, -1};
      static constexpr int dy[] = {1, 0, -1, 0};
      const Cell target{s[x] + dx[a], s[y] + dy[a]};
      if (inside(p, target)) {
        next[x] = target.x;
        next[y] = target.y;
      }
      next[fuel] = s[fuel] - 1;
      if (next[fuel] <= 0) {
        next[fuel] = 0;
        next[done] = 1;
      }
      return {{std::move(next), 1.0}};
    }
    case pick_up:
      if (s[on_board] == 0 && s[x] == s[passenger_loc_x] && s[y] == s[passenger_loc_y]) next[on_board] = 1;
      return {{std::move(next), 1.0}};
    case drop: {
      if (s[on_board] != 1 || s[x] != s[passenger_dest_x] || s[y] != s[passenger_dest_y]) {
        return {{std::move(next), 1.0}};
      }
      next[on_board] = 0;
      next[jobs_done] = s[jobs_done] + 1;
      if (next[jobs_done] >= p.num_jobs) {
        next[jobs_done] = p.num_jobs;
        next[done] = 1;
        return {{std::move(next), 1.0}};
      }
      next[fuel] = p.fuel_capacity;
      Distribution out;
      out.reserve(12);
      for (const Cell loc : p.depots) {
        for (const Cell dest : p.depots) {
          if (loc == dest) continue;
          StateVector spawned = next;
          spawned[passenger_loc_x] = loc.x;
          spawned[passenger_loc_y] = loc.y;
          spawned[passenger_dest_x] = dest.x;
          spawned[passenger_dest_y] = dest.y;
          out.emplace_back(std::move(spawned), 1.0 / 12.0);
        }
      }
      return out;
    }
  }
  return {};
}

Distribution successor_distribution(std::span<const int> s, std::string_view action, const TaxiParams& p) {
  return successor_distribution(s, action_from_name(action), p);
}

ExplicitMdp build_taxi(const TaxiParams& p) {
  p.validate();
  MdpBuilder builder(schema(p), action_names());
  builder.add_state(initial_state(p));
  // States are numbered in breadth-first discovery order.
  for (StateIndex s = 0; s < builder.num_states(); ++s) {
    const StateVector current(builder.state(s).begin(), builder.state(s).end());
    for (ActionIndex a = 0; a < kNumActions; ++a) {
      std::vector<Transition> dist;
      for (auto& [succ, prob] : successor_distribution(current, a, p)) {
        const auto [index, inserted] = builder.add_state(succ);
        if (inserted && builder.num_states() > p.state_cap) {
          throw ResourceError("taxi: more than " + std::to_string(p.state_cap) + " reachable states");
        }
        dist.push_back({index, prob});
      }
      builder.set_distribution(s, a, std::move(dist));
    }
  }
  return std::move(builder).build();
}

std::string completion_property(int num_jobs) {
  return "P=? [ F jobs_done=" + std::to_string(num_jobs) + " & done=1 ]";
}

}  // namespace rashomon::taxi
