#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "marrt/grid_world.hpp"

using namespace marrt;

TEST(GridWorld, IsFree) {
  GridMap empty(10, 10);
  EXPECT_TRUE(is_free(empty, {0, 0}));
  EXPECT_FALSE(is_free(empty, {-1, 0}));
  EXPECT_FALSE(is_free(empty, {10, 3}));
  GridMap walled(10, 10, {{3, 3}});
  EXPECT_FALSE(is_free(walled, {3, 3}));
  EXPECT_TRUE(is_free(walled, {3, 4}));
}

TEST(GridWorld, NeighborsOrder) {
  GridMap m(10, 10);
  EXPECT_EQ(neighbors4(m, {0, 0}), (std::vector<Cell>{{0, 1}, {1, 0}}));
  GridMap s(3, 3);
  EXPECT_EQ(neighbors4(s, {1, 1}), (std::vector<Cell>{{1, 2}, {2, 1}, {1, 0}, {0, 1}}));
  GridMap o(3, 3, {{1, 2}});
  EXPECT_EQ(neighbors4(o, {1, 1}), (std::vector<Cell>{{2, 1}, {1, 0}, {0, 1}}));
}

TEST(GridWorld, NeighborsAreFree) {
  const ProblemInstance p = generate_instance(12, 9, 2, 0.3, 5);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 12; ++x) {
      auto nb = neighbors4(p.map, {x, y});
      EXPECT_LE(nb.size(), 4u);
      for (Cell c : nb) EXPECT_TRUE(is_free(p.map, c));
    }
}

TEST(GridWorld, MapRejectsBadObstacles) {
  EXPECT_THROW(GridMap(3, 3, {{3, 0}}), std::invalid_argument);
  EXPECT_THROW(GridMap(3, 3, {{1, 1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(GridMap(0, 3), std::invalid_argument);
}

TEST(GridWorld, GenerateTenPercent) {
  const ProblemInstance p = generate_instance(10, 10, 1, 0.10, 42);
  EXPECT_EQ(p.map.obstacles().size(), 10u);
  ASSERT_EQ(p.agent_count(), 1u);
  EXPECT_NE(p.starts[0], p.goals[0]);
  EXPECT_TRUE(is_free(p.map, p.starts[0]));
  EXPECT_TRUE(is_free(p.map, p.goals[0]));
}

TEST(GridWorld, GenerateNoObstacles) {
  const ProblemInstance p = generate_instance(10, 10, 3, 0.0, 7);
  EXPECT_TRUE(p.map.obstacles().empty());
  EXPECT_EQ(std::set<Cell>(p.starts.begin(), p.starts.end()).size(), 3u);
  EXPECT_EQ(std::set<Cell>(p.goals.begin(), p.goals.end()).size(), 3u);
}

TEST(GridWorld, GenerateIsDeterministic) {
  EXPECT_EQ(format_instance(generate_instance(17, 11, 4, 0.2, 99)),
            format_instance(generate_instance(17, 11, 4, 0.2, 99)));
  EXPECT_NE(format_instance(generate_instance(17, 11, 4, 0.2, 99)),
            format_instance(generate_instance(17, 11, 4, 0.2, 100)));
}

TEST(GridWorld, GenerateInfeasible) {
  EXPECT_THROW(generate_instance(2, 2, 3, 0.0, 1), InfeasibleInstanceParameters);
  EXPECT_THROW(generate_instance(4, 4, 4, 0.6, 1), InfeasibleInstanceParameters);
  EXPECT_NO_THROW(generate_instance(2, 2, 2, 0.0, 1));
}

TEST(GridWorld, GeneratedInstancesAreValid) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int w = 2 + static_cast<int>(seed % 13), h = 2 + static_cast<int>((seed / 13) % 7);
    const int n = 1 + static_cast<int>(seed % 4);
    const double ratio = 0.05 * static_cast<double>(seed % 7);
    const int free = w * h - static_cast<int>(w * h * ratio + 1e-9);
    if (free < 2 * n) {
      EXPECT_THROW(generate_instance(w, h, n, ratio, seed), InfeasibleInstanceParameters);
      continue;
    }
    const ProblemInstance p = generate_instance(w, h, n, ratio, seed);
    EXPECT_NO_THROW(validate_instance(p));
    EXPECT_EQ(static_cast<int>(p.map.obstacles().size()), w * h - free);
  }
}

TEST(GridWorld, RoundTrip) {
  const ProblemInstance p = generate_instance(10, 10, 3, 0.1, 1);
  EXPECT_EQ(parse_instance(format_instance(p)), p);
  const auto path = std::filesystem::temp_directory_path() / "marrt_roundtrip.txt";
  save_instance(path, p);
  EXPECT_EQ(load_instance(path), p);
  std::filesystem::remove(path);
}

TEST(GridWorld, ParseRejectsStartOnObstacle) {
  const std::string text = "grid 4 4\nseed 0\nobstacle 1 1\nagent 1 1 3 3\n";
  try {
    parse_instance(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(GridWorld, ParseRejectsDuplicateGoals) {
  const std::string text = "grid 4 4\nseed 0\nagent 0 0 3 3\nagent 1 0 3 3\n";
  try {
    parse_instance(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(GridWorld, ParseRejectsMalformed) {
  EXPECT_THROW(parse_instance(std::string("grid 4\n")), ParseError);
  EXPECT_THROW(parse_instance(std::string("grid 4 4\nseed x\n")), ParseError);
  EXPECT_THROW(parse_instance(std::string("grid 4 4\nseed 1\nagent 0 0 9 9\n")), ParseError);
  EXPECT_THROW(parse_instance(std::string("grid 4 4\nseed 1\nwall 1 1\n")), ParseError);
  EXPECT_THROW(parse_instance(std::string("grid 4 4\nseed 1\n")), ParseError);
}

TEST(GridWorld, ParseAcceptsComments) {
  const std::string text = "# a comment\ngrid 3 2\n\nseed 4  # trailing\nagent 0 0 2 1\n";
  const ProblemInstance p = parse_instance(text);
  EXPECT_EQ(p.map.width(), 3);
  EXPECT_EQ(p.seed, 4u);
  EXPECT_EQ(p.goals[0], (Cell{2, 1}));
}
