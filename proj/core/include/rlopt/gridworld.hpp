#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rlopt {

/// Grid coordinate; x grows to the right, y grows downward (row index).
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class Action : std::uint8_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {Action::kUp, Action::kDown,
                                                                Action::kLeft, Action::kRight};

const char* to_string(Action action);

/// Obstacle cell with a schedule keyed to the agent's episode index.
///
///   permanent     blocked at every episode
///   closes_at(e)  passable for episodes < e, blocked from e on
///   opens_at(e)   blocked for episodes < e, passable from e on
struct ObstacleRule {
  enum class Kind : std::uint8_t { kPermanent, kClosesAt, kOpensAt };

  Cell cell;
  Kind kind = Kind::kPermanent;
  int episode = 0;

  bool blocked_at(int episode_index) const noexcept;
  bool operator==(const ObstacleRule&) const = default;
};

struct GridSpec {
  int width = 0;
  int height = 0;
  Cell start;
  Cell goal;
  std::vector<ObstacleRule> obstacles;
  std::vector<int> change_episodes = {15, 30};

  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  int num_cells() const noexcept { return width * height; }
  /// Row-major state index of an in-bounds cell.
  int index(Cell c) const noexcept { return c.y * width + c.x; }
  Cell cell_at(int state_index) const noexcept { return {state_index % width, state_index / width}; }

  bool operator==(const GridSpec&) const = default;
};

struct EnvState {
  Cell position;
  int episode_index = 0;
  int step_count = 0;
  bool operator==(const EnvState&) const = default;
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  bool terminal = false;
};

/// Cells blocked at `episode`. Pure in (spec, episode).
std::set<Cell> active_obstacles(const GridSpec& spec, int episode);

/// True when `cell` is covered by a rule that is blocking at `episode`.
bool is_blocked(const GridSpec& spec, Cell cell, int episode) noexcept;

EnvState reset(const GridSpec& spec, int episode);

/// Deterministic transition. Moves into walls or active obstacles leave the
/// position unchanged; entering the goal yields reward 1 and terminates.
/// Throws UsageError when called from the goal cell.
StepResult step(const GridSpec& spec, const EnvState& state, Action action);

/// Breadth-first reachability of goal from start with the episode's obstacles.
bool path_exists(const GridSpec& spec, int episode);

/// Shortest start-to-goal path length at `episode`, or -1 when unreachable.
int shortest_path_length(const GridSpec& spec, int episode);

/// Throws LayoutError naming the first violated invariant.
void validate(const GridSpec& spec);

// Layout text format
// ------------------
// First non-comment line: "<width> <height>". Then `height` rows of `width`
// whitespace-separated tokens:
//
//   .      free cell
//   S      start (exactly one)
//   G      goal (exactly one)
//   #      permanent obstacle
//   C<e>   obstacle closing at episode e (passable before)
//   O<e>   obstacle opening at episode e (blocked before)
//
// Lines whose first non-blank character is ';' are comments. The change
// episodes are the sorted distinct e values of the C/O cells, or {15, 30}
// when the layout has none.
GridSpec parse_layout(std::string_view text);
GridSpec load_layout(const std::filesystem::path& path);
std::string format_layout(const GridSpec& spec);

/// Text of the shipped 9x6 double-blocking layout (same content as
/// data/layouts/double_blocking.grid).
std::string_view default_layout_text();
GridSpec default_layout();

}  // namespace rlopt
