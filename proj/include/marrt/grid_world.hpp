#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace marrt {

/// Grid cell, 0-based column `x` and row `y`. "Up" is +y.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell &, const Cell &) = default;
};

/// Rectangular 4-connected grid with static obstacles. Immutable once built.
class GridMap {
public:
  GridMap() = default;
  GridMap(int width, int height, const std::vector<Cell> &obstacles = {});

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  bool is_obstacle(Cell c) const { return blocked_[index(c)] != 0; }

  /// Row-major linear index; `c` must be in bounds.
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell_at(int index) const { return {index % width_, index / width_}; }

  /// Obstacles in ascending linear-index order.
  const std::vector<Cell> &obstacles() const { return obstacles_; }
  /// Statically free cells in ascending linear-index order.
  const std::vector<Cell> &free_cells() const { return free_; }

  int cell_count() const { return width_ * height_; }

  friend bool operator==(const GridMap &a, const GridMap &b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.obstacles_ == b.obstacles_;
  }

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> blocked_;
  std::vector<Cell> obstacles_;
  std::vector<Cell> free_;
};

/// In bounds and not an obstacle. Out-of-bounds cells are simply not free.
inline bool is_free(const GridMap &map, Cell c) {
  return map.in_bounds(c) && !map.is_obstacle(c);
}

/// Unit moves in the fixed order [up, right, down, left].
inline constexpr Cell kMoves[4] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

inline Cell step(Cell c, Cell delta) { return {c.x + delta.x, c.y + delta.y}; }

/// Free 4-neighbors of `c` in [up, right, down, left] order. Excludes `c`.
std::vector<Cell> neighbors4(const GridMap &map, Cell c);

struct ProblemInstance {
  GridMap map;
  std::vector<Cell> starts;
  std::vector<Cell> goals;
  std::uint64_t seed = 0;

  std::size_t agent_count() const { return starts.size(); }

  friend bool operator==(const ProblemInstance &, const ProblemInstance &) = default;
};

class InfeasibleInstanceParameters : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidInstance : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string &what);
  int line() const { return line_; }

private:
  int line_;
};

/// Throws InvalidInstance describing the first violated invariant.
void validate_instance(const ProblemInstance &instance);

/// Removes floor(width*height*ratio) obstacles uniformly, then draws starts
/// and goals (each role without replacement) from the remaining free cells.
ProblemInstance generate_instance(int width, int height, int n_agents,
                                  double obstacle_ratio, std::uint64_t seed);

std::string format_instance(const ProblemInstance &instance);
ProblemInstance parse_instance(std::istream &in);
ProblemInstance parse_instance(const std::string &text);

void save_instance(const std::filesystem::path &path, const ProblemInstance &instance);
ProblemInstance load_instance(const std::filesystem::path &path);

} // namespace marrt
