#include "rlopt/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>

#include "rlopt/errors.hpp"

namespace rlopt {
namespace {

constexpr std::string_view kDefaultLayout =
    "; Double-blocking gridworld (9 x 6).\n"
    "; Legend: S start, G goal, # permanent wall, C<e> closes at episode e,\n"
    ";         O<e> opens at episode e, . free.\n"
    "9 6\n"
    ".  .  .  .  .  .  .  .  G\n"
    ".  #  #  #  #  #  #  #  #\n"
    ".  .  .  .  .  .  .  .  .\n"
    "#  #  #  C15 #  O30 #  #  .\n"
    ".  .  .  .  .  .  .  .  .\n"
    "S  .  .  .  .  .  .  .  .\n";

Cell moved(Cell c, Action a) noexcept {
  switch (a) {
    case Action::kUp: return {c.x, c.y - 1};
    case Action::kDown: return {c.x, c.y + 1};
    case Action::kLeft: return {c.x - 1, c.y};
    case Action::kRight: return {c.x + 1, c.y};
  }
  return c;
}

std::string describe(Cell c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

int parse_int(std::string_view token, int line_no) {
  int value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw LayoutError("line " + std::to_string(line_no) + ": expected integer, got '" +
                      std::string(token) + "'");
  }
  return value;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  return tokens;
}

}  // namespace

const char* to_string(Action action) {
  switch (action) {
    case Action::kUp: return "up";
    case Action::kDown: return "down";
    case Action::kLeft: return "left";
    case Action::kRight: return "right";
  }
  return "?";
}

bool ObstacleRule::blocked_at(int episode_index) const noexcept {
  switch (kind) {
    case Kind::kPermanent: return true;
    case Kind::kClosesAt: return episode_index >= episode;
    case Kind::kOpensAt: return episode_index < episode;
  }
  return true;
}

std::set<Cell> active_obstacles(const GridSpec& spec, int episode) {
  if (episode < 0) throw UsageError("active_obstacles: negative episode index");
  std::set<Cell> cells;
  for (const auto& rule : spec.obstacles) {
    if (rule.blocked_at(episode)) cells.insert(rule.cell);
  }
  return cells;
}

bool is_blocked(const GridSpec& spec, Cell cell, int episode) noexcept {
  for (const auto& rule : spec.obstacles) {
    if (rule.cell == cell && rule.blocked_at(episode)) return true;
  }
  return false;
}

EnvState reset(const GridSpec& spec, int episode) {
  if (episode < 0) throw UsageError("reset: negative episode index");
  return EnvState{spec.start, episode, 0};
}

StepResult step(const GridSpec& spec, const EnvState& state, Action action) {
  if (state.position == spec.goal) {
    throw UsageError("step: episode already terminated at the goal");
  }
  StepResult out;
  out.state = state;
  out.state.step_count += 1;
  const Cell next = moved(state.position, action);
  if (spec.in_bounds(next) && !is_blocked(spec, next, state.episode_index)) {
    out.state.position = next;
  }
  out.terminal = out.state.position == spec.goal;
  out.reward = out.terminal ? 1.0 : 0.0;
  return out;
}

int shortest_path_length(const GridSpec& spec, int episode) {
  if (!spec.in_bounds(spec.start) || !spec.in_bounds(spec.goal)) return -1;
  std::vector<int> dist(static_cast<std::size_t>(spec.num_cells()), -1);
  std::vector<char> blocked(dist.size(), 0);
  for (Cell c : active_obstacles(spec, episode)) {
    if (spec.in_bounds(c)) blocked[static_cast<std::size_t>(spec.index(c))] = 1;
  }
  std::deque<Cell> frontier{spec.start};
  dist[static_cast<std::size_t>(spec.index(spec.start))] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    const int d = dist[static_cast<std::size_t>(spec.index(c))];
    if (c == spec.goal) return d;
    for (Action a : kAllActions) {
      const Cell n = moved(c, a);
      if (!spec.in_bounds(n)) continue;
      const auto ni = static_cast<std::size_t>(spec.index(n));
      if (blocked[ni] || dist[ni] >= 0) continue;
      dist[ni] = d + 1;
      frontier.push_back(n);
    }
  }
  return -1;
}

bool path_exists(const GridSpec& spec, int episode) {
  return shortest_path_length(spec, episode) >= 0;
}

void validate(const GridSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw LayoutError("grid dimensions must be positive");
  if (!spec.in_bounds(spec.start)) throw LayoutError("start " + describe(spec.start) + " out of bounds");
  if (!spec.in_bounds(spec.goal)) throw LayoutError("goal " + describe(spec.goal) + " out of bounds");
  if (spec.start == spec.goal) throw LayoutError("start and goal coincide");

  std::set<Cell> seen;
  for (const auto& rule : spec.obstacles) {
    if (!spec.in_bounds(rule.cell)) throw LayoutError("obstacle " + describe(rule.cell) + " out of bounds");
    if (rule.cell == spec.start || rule.cell == spec.goal) {
      throw LayoutError("obstacle " + describe(rule.cell) + " on start or goal");
    }
    if (!seen.insert(rule.cell).second) throw LayoutError("duplicate obstacle at " + describe(rule.cell));
    if (rule.kind != ObstacleRule::Kind::kPermanent && rule.episode < 1) {
      throw LayoutError("obstacle " + describe(rule.cell) + " has change episode < 1");
    }
  }

  for (std::size_t i = 0; i < spec.change_episodes.size(); ++i) {
    if (spec.change_episodes[i] < 1) throw LayoutError("change episodes must be >= 1");
    if (i > 0 && spec.change_episodes[i] <= spec.change_episodes[i - 1]) {
      throw LayoutError("change episodes must be strictly increasing");
    }
  }
  for (const auto& rule : spec.obstacles) {
    if (rule.kind == ObstacleRule::Kind::kPermanent) continue;
    if (!std::binary_search(spec.change_episodes.begin(), spec.change_episodes.end(), rule.episode)) {
      throw LayoutError("obstacle " + describe(rule.cell) + " changes at episode " +
                        std::to_string(rule.episode) + " which is not a change episode");
    }
  }

  // The obstacle set is constant between change episodes, so checking the
  // start of every phase covers every episode index.
  std::vector<int> phases{0};
  phases.insert(phases.end(), spec.change_episodes.begin(), spec.change_episodes.end());
  for (int episode : phases) {
    if (!path_exists(spec, episode)) {
      throw LayoutError("no path from start to goal at episode " + std::to_string(episode));
    }
  }
}

GridSpec parse_layout(std::string_view text) {
  std::istringstream in{std::string(text)};
  GridSpec spec;
  spec.change_episodes.clear();
  bool have_header = false;
  bool have_start = false;
  bool have_goal = false;
  int row = 0;
  int line_no = 0;

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    const auto tokens = tokenize(line);

    if (!have_header) {
      if (tokens.size() != 2) throw LayoutError("line " + std::to_string(line_no) + ": expected '<width> <height>'");
      spec.width = parse_int(tokens[0], line_no);
      spec.height = parse_int(tokens[1], line_no);
      if (spec.width <= 0 || spec.height <= 0) throw LayoutError("grid dimensions must be positive");
      have_header = true;
      continue;
    }
    if (row >= spec.height) throw LayoutError("line " + std::to_string(line_no) + ": more rows than height");
    if (static_cast<int>(tokens.size()) != spec.width) {
      throw LayoutError("line " + std::to_string(line_no) + ": expected " + std::to_string(spec.width) +
                        " cells, got " + std::to_string(tokens.size()));
    }
    for (int x = 0; x < spec.width; ++x) {
      const std::string& tok = tokens[static_cast<std::size_t>(x)];
      const Cell cell{x, row};
      if (tok == ".") continue;
      if (tok == "S" || tok == "G") {
        bool& flag = tok == "S" ? have_start : have_goal;
        if (flag) throw LayoutError("line " + std::to_string(line_no) + ": more than one '" + tok + "'");
        flag = true;
        (tok == "S" ? spec.start : spec.goal) = cell;
      } else if (tok == "#") {
        spec.obstacles.push_back({cell, ObstacleRule::Kind::kPermanent, 0});
      } else if (tok.size() > 1 && (tok[0] == 'C' || tok[0] == 'O')) {
        const int e = parse_int(std::string_view(tok).substr(1), line_no);
        const auto kind = tok[0] == 'C' ? ObstacleRule::Kind::kClosesAt : ObstacleRule::Kind::kOpensAt;
        spec.obstacles.push_back({cell, kind, e});
        spec.change_episodes.push_back(e);
      } else {
        throw LayoutError("line " + std::to_string(line_no) + ": unknown cell token '" + tok + "'");
      }
    }
    ++row;
  }
  if (!have_header) throw LayoutError("missing '<width> <height>' header");
  if (row != spec.height) {
    throw LayoutError("expected " + std::to_string(spec.height) + " rows, got " + std::to_string(row));
  }
  if (!have_start) throw LayoutError("layout has no start cell 'S'");
  if (!have_goal) throw LayoutError("layout has no goal cell 'G'");

  std::sort(spec.change_episodes.begin(), spec.change_episodes.end());
  spec.change_episodes.erase(std::unique(spec.change_episodes.begin(), spec.change_episodes.end()),
                             spec.change_episodes.end());
  if (spec.change_episodes.empty()) spec.change_episodes = {15, 30};

  validate(spec);
  return spec;
}

GridSpec load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LayoutError("cannot open layout file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_layout(buffer.str());
}

std::string format_layout(const GridSpec& spec) {
  std::vector<std::string> cells(static_cast<std::size_t>(spec.num_cells()), ".");
  for (const auto& rule : spec.obstacles) {
    std::string tok = "#";
    if (rule.kind == ObstacleRule::Kind::kClosesAt) tok = "C" + std::to_string(rule.episode);
    if (rule.kind == ObstacleRule::Kind::kOpensAt) tok = "O" + std::to_string(rule.episode);
    cells[static_cast<std::size_t>(spec.index(rule.cell))] = tok;
  }
  cells[static_cast<std::size_t>(spec.index(spec.start))] = "S";
  cells[static_cast<std::size_t>(spec.index(spec.goal))] = "G";

  std::ostringstream out;
  out << spec.width << ' ' << spec.height << '\n';
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (x > 0) out << ' ';
      out << cells[static_cast<std::size_t>(spec.index({x, y}))];
    }
    out << '\n';
  }
  return out.str();
}

std::string_view default_layout_text() { return kDefaultLayout; }

GridSpec default_layout() { return parse_layout(kDefaultLayout); }

}  // namespace rlopt
