#include "rlopt/gridworld.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rlopt/errors.hpp"
#include "rlopt/random.hpp"

namespace rlopt {
namespace {

// The shipped layout, enumerated by hand:
//
//   y0  .  .  .  .  .  .  .  .  G
//   y1  .  #  #  #  #  #  #  #  #
//   y2  .  .  .  .  .  .  .  .  .
//   y3  #  #  #  C15 #  O30 #  #  .
//   y4  .  .  .  .  .  .  .  .  .
//   y5  S  .  .  .  .  .  .  .  .
std::set<Cell> permanent_cells() {
  std::set<Cell> cells;
  for (int x = 1; x <= 8; ++x) cells.insert({x, 1});
  for (int x : {0, 1, 2, 4, 6, 7}) cells.insert({x, 3});
  return cells;
}

constexpr Cell kCloses{3, 3};
constexpr Cell kOpens{5, 3};

TEST(Gridworld, DefaultLayoutShape) {
  const GridSpec spec = default_layout();
  EXPECT_EQ(spec.width, 9);
  EXPECT_EQ(spec.height, 6);
  EXPECT_EQ(spec.start, (Cell{0, 5}));
  EXPECT_EQ(spec.goal, (Cell{8, 0}));
  EXPECT_EQ(spec.change_episodes, (std::vector<int>{15, 30}));
}

TEST(Gridworld, ActiveObstaclesAtEpisodeZeroArePermanentPlusOpening) {
  auto expected = permanent_cells();
  expected.insert(kOpens);
  EXPECT_EQ(active_obstacles(default_layout(), 0), expected);
}

TEST(Gridworld, ScheduleTransitionsExactlyAtChangeEpisodes) {
  const GridSpec spec = default_layout();
  for (int e = 0; e < 60; ++e) {
    auto expected = permanent_cells();
    if (e >= 15) expected.insert(kCloses);
    if (e < 30) expected.insert(kOpens);
    ASSERT_EQ(active_obstacles(spec, e), expected) << "episode " << e;
  }
  EXPECT_FALSE(is_blocked(spec, kCloses, 14));
  EXPECT_TRUE(is_blocked(spec, kCloses, 15));
  EXPECT_TRUE(is_blocked(spec, kOpens, 29));
  EXPECT_FALSE(is_blocked(spec, kOpens, 30));
}

TEST(Gridworld, ActiveObstaclesIsPure) {
  const GridSpec spec = default_layout();
  for (int e : {0, 15, 31}) EXPECT_EQ(active_obstacles(spec, e), active_obstacles(spec, e));
  EXPECT_THROW(active_obstacles(spec, -1), UsageError);
}

TEST(Gridworld, PathExistsInEveryPhase) {
  const GridSpec spec = default_layout();
  for (int e : {0, 14, 15, 29, 30, 49, 1000}) EXPECT_TRUE(path_exists(spec, e)) << "episode " << e;
}

TEST(Gridworld, ShortestPathLengthsPerPhase) {
  // Hand-traced routes: through C15 (19 moves), around the right end of
  // both walls (29) and through O30 (23).
  const GridSpec spec = default_layout();
  EXPECT_EQ(shortest_path_length(spec, 0), 19);
  EXPECT_EQ(shortest_path_length(spec, 14), 19);
  EXPECT_EQ(shortest_path_length(spec, 15), 29);
  EXPECT_EQ(shortest_path_length(spec, 29), 29);
  EXPECT_EQ(shortest_path_length(spec, 30), 23);
}

TEST(Gridworld, ResetPlacesAgentAtStart) {
  const GridSpec spec = default_layout();
  const EnvState s0 = reset(spec, 0);
  EXPECT_EQ(s0.position, spec.start);
  EXPECT_EQ(s0.step_count, 0);
  EXPECT_EQ(s0.episode_index, 0);
  const EnvState s30 = reset(spec, 30);
  EXPECT_EQ(s30.position, spec.start);
  EXPECT_EQ(s30.episode_index, 30);
  EXPECT_EQ(reset(spec, 30), s30);
  EXPECT_THROW(reset(spec, -3), UsageError);
}

TEST(Gridworld, EnteringGoalPaysOneAndTerminates) {
  const GridSpec spec = default_layout();
  const StepResult r = step(spec, EnvState{{7, 0}, 3, 10}, Action::kRight);
  EXPECT_EQ(r.state.position, spec.goal);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.state.step_count, 11);
}

TEST(Gridworld, BoundaryMoveKeepsPositionAndCountsStep) {
  const GridSpec spec = default_layout();
  const StepResult r = step(spec, reset(spec, 0), Action::kLeft);
  EXPECT_EQ(r.state.position, spec.start);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(r.state.step_count, 1);
}

TEST(Gridworld, ClosedCellBlocksAfterItsEpisode) {
  const GridSpec spec = default_layout();
  const Cell below{3, 4};
  EXPECT_EQ(step(spec, EnvState{below, 14, 0}, Action::kUp).state.position, kCloses);
  EXPECT_EQ(step(spec, EnvState{below, 20, 0}, Action::kUp).state.position, below);
  const Cell below_open{5, 4};
  EXPECT_EQ(step(spec, EnvState{below_open, 29, 0}, Action::kUp).state.position, below_open);
  EXPECT_EQ(step(spec, EnvState{below_open, 30, 0}, Action::kUp).state.position, kOpens);
}

TEST(Gridworld, SteppingFromGoalIsUsageError) {
  const GridSpec spec = default_layout();
  EXPECT_THROW(step(spec, EnvState{spec.goal, 0, 4}, Action::kUp), UsageError);
}

TEST(GridworldProperty, RandomWalksNeverEnterActiveObstacles) {
  const GridSpec spec = default_layout();
  Rng rng(2024);
  for (int episode : {0, 10, 15, 22, 30, 45}) {
    const auto blocked = active_obstacles(spec, episode);
    EnvState s = reset(spec, episode);
    for (int t = 0; t < 3000; ++t) {
      const EnvState before = s;
      const StepResult r = step(spec, s, kAllActions[uniform_index(rng, kNumActions)]);
      ASSERT_TRUE(spec.in_bounds(r.state.position));
      ASSERT_EQ(blocked.count(r.state.position), 0u);
      ASSERT_EQ(r.reward, r.state.position == spec.goal ? 1.0 : 0.0);
      ASSERT_EQ(r.state.step_count, before.step_count + 1);
      const int dist = std::abs(r.state.position.x - before.position.x) + std::abs(r.state.position.y - before.position.y);
      ASSERT_LE(dist, 1);
      s = r.terminal ? reset(spec, episode) : r.state;
    }
  }
}

TEST(GridworldProperty, TransitionsAreDeterministic) {
  const GridSpec spec = default_layout();
  for (int i = 0; i < spec.num_cells(); ++i) {
    const Cell c = spec.cell_at(i);
    if (c == spec.goal || is_blocked(spec, c, 0)) continue;
    for (Action a : kAllActions) {
      const EnvState s{c, 0, 5};
      const StepResult r1 = step(spec, s, a);
      const StepResult r2 = step(spec, s, a);
      EXPECT_EQ(r1.state, r2.state);
      EXPECT_EQ(r1.reward, r2.reward);
    }
  }
}

TEST(GridLayout, ShippedDataFileMatchesBuiltIn) {
  std::ifstream in(std::string(RLOPT_DATA_DIR) + "/layouts/double_blocking.grid");
  ASSERT_TRUE(in);
  std::ostringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), default_layout_text());
  EXPECT_EQ(load_layout(std::string(RLOPT_DATA_DIR) + "/layouts/double_blocking.grid"), default_layout());
}

TEST(GridLayout, FormatRoundTrips) {
  const GridSpec spec = default_layout();
  EXPECT_EQ(parse_layout(format_layout(spec)), spec);
}

TEST(GridLayout, LayoutWithoutSchedulesDefaultsChangeEpisodes) {
  const GridSpec spec = parse_layout("3 2\nS # .\n. . G\n");
  EXPECT_EQ(spec.change_episodes, (std::vector<int>{15, 30}));
  EXPECT_EQ(shortest_path_length(spec, 0), 3);
}

TEST(GridLayout, RejectsMalformedText) {
  EXPECT_THROW(parse_layout(""), LayoutError);
  EXPECT_THROW(parse_layout("3 1\nS . .\n"), LayoutError);              // no goal
  EXPECT_THROW(parse_layout("3 1\nS G G\n"), LayoutError);              // two goals
  EXPECT_THROW(parse_layout("3 1\nS x G\n"), LayoutError);              // unknown token
  EXPECT_THROW(parse_layout("3 2\nS . G\n"), LayoutError);              // missing row
  EXPECT_THROW(parse_layout("3 1\nS . . G\n"), LayoutError);            // row too wide
  EXPECT_THROW(parse_layout("3 1\nS # G\n"), LayoutError);              // unreachable
  EXPECT_THROW(parse_layout("3 1\nS C5 G\n"), LayoutError);             // cut off from episode 5
  EXPECT_THROW(parse_layout("3 2\nS O0 G\n. . .\n"), LayoutError);      // change episode < 1
  EXPECT_THROW(parse_layout("0 2\n"), LayoutError);
  EXPECT_THROW(load_layout("/nonexistent/layout.grid"), LayoutError);
}

TEST(GridLayout, ValidateRejectsObstacleOnStart) {
  GridSpec spec = default_layout();
  spec.obstacles.push_back({spec.start, ObstacleRule::Kind::kPermanent, 0});
  EXPECT_THROW(validate(spec), LayoutError);
}

}  // namespace
}  // namespace rlopt
