#include "marrt/grid_world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "line_reader.hpp"

namespace marrt {

GridMap::GridMap(int width, int height, const std::vector<Cell> &obstacles)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  blocked_.assign(static_cast<std::size_t>(width) * height, 0);
  for (Cell c : obstacles) {
    if (!in_bounds(c))
      throw std::invalid_argument("obstacle (" + std::to_string(c.x) + "," +
                                  std::to_string(c.y) + ") out of bounds");
    if (blocked_[index(c)])
      throw std::invalid_argument("duplicate obstacle (" + std::to_string(c.x) +
                                  "," + std::to_string(c.y) + ")");
    blocked_[index(c)] = 1;
  }
  for (int i = 0; i < cell_count(); ++i)
    (blocked_[i] ? obstacles_ : free_).push_back(cell_at(i));
}

std::vector<Cell> neighbors4(const GridMap &map, Cell c) {
  std::vector<Cell> out;
  out.reserve(4);
  for (Cell d : kMoves) {
    Cell n = step(c, d);
    if (is_free(map, n)) out.push_back(n);
  }
  return out;
}

ParseError::ParseError(int line, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string cell_str(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

// Returns an empty string when valid.
std::string check_role(const GridMap &map, const std::vector<Cell> &cells,
                       const char *role) {
  std::set<Cell> seen;
  for (Cell c : cells) {
    if (!map.in_bounds(c)) return std::string(role) + " " + cell_str(c) + " out of bounds";
    if (map.is_obstacle(c)) return std::string(role) + " " + cell_str(c) + " on obstacle";
    if (!seen.insert(c).second) return std::string("duplicate ") + role + " " + cell_str(c);
  }
  return {};
}

// Partial Fisher-Yates: the first k entries of `pool` become a uniform
// ordered sample without replacement.
template <class T>
void sample_prefix(std::vector<T> &pool, std::size_t k, std::mt19937_64 &rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
}

} // namespace

void validate_instance(const ProblemInstance &instance) {
  if (instance.starts.empty()) throw InvalidInstance("instance has no agents");
  if (instance.starts.size() != instance.goals.size())
    throw InvalidInstance("start and goal counts differ");
  if (auto e = check_role(instance.map, instance.starts, "start"); !e.empty())
    throw InvalidInstance(e);
  if (auto e = check_role(instance.map, instance.goals, "goal"); !e.empty())
    throw InvalidInstance(e);
}

ProblemInstance generate_instance(int width, int height, int n_agents,
                                  double obstacle_ratio, std::uint64_t seed) {
  if (width <= 0 || height <= 0 || n_agents < 1)
    throw InfeasibleInstanceParameters("need positive dimensions and at least one agent");
  if (!(obstacle_ratio >= 0.0 && obstacle_ratio <= 1.0))
    throw InfeasibleInstanceParameters("obstacle ratio must lie in [0, 1]");

  const int cells = width * height;
  // The epsilon absorbs representation error such as 900 * 0.1 = 90.000...01.
  const int n_obstacles =
      static_cast<int>(std::floor(static_cast<double>(cells) * obstacle_ratio + 1e-9));
  if (cells - n_obstacles < 2 * n_agents)
    throw InfeasibleInstanceParameters(
        std::to_string(cells - n_obstacles) + " free cells cannot host " +
        std::to_string(n_agents) + " distinct starts and goals");

  std::mt19937_64 rng(seed);
  std::vector<int> order(cells);
  for (int i = 0; i < cells; ++i) order[i] = i;
  sample_prefix(order, n_obstacles, rng);

  std::vector<int> obstacle_idx(order.begin(), order.begin() + n_obstacles);
  std::sort(obstacle_idx.begin(), obstacle_idx.end());
  std::vector<Cell> obstacles;
  obstacles.reserve(obstacle_idx.size());
  for (int i : obstacle_idx) obstacles.push_back({i % width, i / width});

  ProblemInstance inst{GridMap(width, height, obstacles), {}, {}, seed};

  std::vector<Cell> pool = inst.map.free_cells();
  sample_prefix(pool, n_agents, rng);
  inst.starts.assign(pool.begin(), pool.begin() + n_agents);

  pool = inst.map.free_cells();
  sample_prefix(pool, n_agents, rng);
  inst.goals.assign(pool.begin(), pool.begin() + n_agents);
  return inst;
}

std::string format_instance(const ProblemInstance &instance) {
  std::ostringstream out;
  out << "grid " << instance.map.width() << ' ' << instance.map.height() << '\n';
  out << "seed " << instance.seed << '\n';
  for (Cell c : instance.map.obstacles()) out << "obstacle " << c.x << ' ' << c.y << '\n';
  for (std::size_t i = 0; i < instance.starts.size(); ++i)
    out << "agent " << instance.starts[i].x << ' ' << instance.starts[i].y << ' '
        << instance.goals[i].x << ' ' << instance.goals[i].y << '\n';
  return out.str();
}

ProblemInstance parse_instance(std::istream &in) {
  using namespace detail;
  const auto lines = tokenize_lines(in);
  if (lines.empty()) throw ParseError(0, "empty instance file");

  const Line &head = lines[0];
  if (head.tokens[0] != "grid") throw ParseError(head.number, "expected 'grid W H'");
  expect_arity(head, 3);
  const auto width = parse_integer(head, head.tokens[1]);
  const auto height = parse_integer(head, head.tokens[2]);
  if (width <= 0 || height <= 0 || width * height > (1LL << 30))
    throw ParseError(head.number, "grid dimensions out of range");

  if (lines.size() < 2 || lines[1].tokens[0] != "seed")
    throw ParseError(lines.size() < 2 ? head.number : lines[1].number, "expected 'seed S'");
  expect_arity(lines[1], 2);
  const auto seed = parse_unsigned(lines[1], lines[1].tokens[1]);

  std::vector<Cell> obstacles;
  std::vector<std::uint8_t> blocked(static_cast<std::size_t>(width * height), 0);
  std::vector<Cell> starts, goals;
  std::set<Cell> start_set, goal_set;

  auto read_cell = [&](const Line &line, std::size_t at) {
    Cell c{static_cast<int>(parse_integer(line, line.tokens[at])),
           static_cast<int>(parse_integer(line, line.tokens[at + 1]))};
    if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height)
      throw ParseError(line.number, "cell " + cell_str(c) + " out of bounds");
    return c;
  };
  auto is_blocked = [&](Cell c) { return blocked[c.y * width + c.x] != 0; };

  for (std::size_t i = 2; i < lines.size(); ++i) {
    const Line &line = lines[i];
    const std::string &key = line.tokens[0];
    if (key == "obstacle") {
      expect_arity(line, 3);
      if (!starts.empty()) throw ParseError(line.number, "obstacle after agent lines");
      Cell c = read_cell(line, 1);
      if (is_blocked(c)) throw ParseError(line.number, "duplicate obstacle " + cell_str(c));
      blocked[c.y * width + c.x] = 1;
      obstacles.push_back(c);
    } else if (key == "agent") {
      expect_arity(line, 5);
      Cell s = read_cell(line, 1);
      Cell g = read_cell(line, 3);
      if (is_blocked(s)) throw ParseError(line.number, "start " + cell_str(s) + " on obstacle");
      if (is_blocked(g)) throw ParseError(line.number, "goal " + cell_str(g) + " on obstacle");
      if (!start_set.insert(s).second)
        throw ParseError(line.number, "duplicate start " + cell_str(s));
      if (!goal_set.insert(g).second)
        throw ParseError(line.number, "duplicate goal " + cell_str(g));
      starts.push_back(s);
      goals.push_back(g);
    } else {
      throw ParseError(line.number, "unknown record '" + key + "'");
    }
  }
  if (starts.empty()) throw ParseError(lines.back().number, "instance has no agents");

  return ProblemInstance{GridMap(static_cast<int>(width), static_cast<int>(height), obstacles),
                         std::move(starts), std::move(goals), seed};
}

ProblemInstance parse_instance(const std::string &text) {
  std::istringstream in(text);
  return parse_instance(in);
}

void save_instance(const std::filesystem::path &path, const ProblemInstance &instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_instance(instance);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ProblemInstance load_instance(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_instance(in);
}

} // namespace marrt
