#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcq/errors.hpp"
#include "lcq/function_io.hpp"

namespace lcq {
namespace {

double at(const ConvexFunction& u, std::initializer_list<double> x) {
  const std::vector<double> v(x);
  return value_or_inf(u, v);
}

TEST(FunctionIo, ParsesPresets) {
  const auto q = function_from_json(R"({"kind":"quadratic","Q":[[2,0],[0,1]],"b":[1,0],"c":0.5})");
  EXPECT_NEAR(at(q, {1.0, 2.0}), 1.0 + 2.0 + 1.0 + 0.5, 1e-14);
  const auto g = function_from_json(R"({"kind":"quadratic","dim":3})");
  EXPECT_NEAR(at(g, {1.0, 1.0, 1.0}), 1.5, 1e-14);
  const auto b = function_from_json(R"({"kind":"indicator_ball","dim":2,"radius":2,"offset":1})");
  EXPECT_EQ(at(b, {1.0, 1.0}), 1.0);
  const auto n = function_from_json(R"({"kind":"norm_multiple","dim":2,"a":3})");
  EXPECT_NEAR(at(n, {3.0, 4.0}), 15.0, 1e-14);
  const auto w = function_from_json(R"({"kind":"weighted_l1","weights":[1,2]})");
  EXPECT_NEAR(at(w, {-1.0, 1.0}), 3.0, 1e-14);
  const auto x = function_from_json(R"({"kind":"indicator_box","halfwidths":[1,2]})");
  EXPECT_TRUE(std::isinf(at(x, {1.5, 0.0})));
}

TEST(FunctionIo, RejectsMalformed) {
  EXPECT_THROW(function_from_json("{"), InvalidArgument);
  EXPECT_THROW(function_from_json(R"({"kind":"cone"})"), InvalidArgument);
  EXPECT_THROW(function_from_json(R"({"kind":"quadratic","Q":[[1,0]]})"), InvalidArgument);
  EXPECT_THROW(function_from_json(R"({"kind":"indicator_ball","dim":0,"radius":1})"), InvalidArgument);
  EXPECT_THROW(function_from_json(R"({"kind":"grid","file":"/nonexistent/x.csv"})"), InvalidArgument);
}

TEST(FunctionIo, GridCsvRoundTripIsExact) {
  const GridSpec g({Axis{-1.0, 1.0, 5}, Axis{0.0, 0.3, 4}});
  std::vector<double> v(g.size());
  std::vector<std::uint8_t> fin(g.size(), 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vector x = g.point(k);
    v[k] = x.squaredNorm() / 3.0;
  }
  fin[0] = 0;
  v[0] = kInf;
  const auto u = ConvexFunction::from_grid(g, v, fin);
  std::stringstream csv;
  write_grid_csv(u.samples(), csv);
  const auto back = read_grid_csv(csv);
  EXPECT_EQ(back.samples().grid, g);
  EXPECT_EQ(back.samples().finite, fin);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_EQ(back.samples().values[k], v[k]);
}

TEST(FunctionIo, SaveAndLoadGridSpec) {
  const auto dir = std::filesystem::temp_directory_path() / "lcq_io_test";
  std::filesystem::create_directories(dir);
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(2), GridSpec::cube(2, 1.0, 9));
  save_function(u, dir / "u.json");
  const auto back = load_function(dir / "u.json");
  ASSERT_TRUE(back.is_grid());
  EXPECT_EQ(back.samples().values, u.samples().values);
  std::filesystem::remove_all(dir);
}

TEST(FunctionIo, PresetJsonRoundTrip) {
  const auto u = ConvexFunction::weighted_l1(Eigen::Vector3d(1.0, 0.5, 2.0), -1.0);
  const auto back = function_from_json(function_to_json(u));
  EXPECT_EQ(at(back, {1.0, 1.0, 1.0}), at(u, {1.0, 1.0, 1.0}));
}

TEST(FunctionIo, RejectsBadCsv) {
  std::stringstream bad("2,0,1,2\n0,1\n");
  EXPECT_THROW(read_grid_csv(bad), InvalidArgument);
  std::stringstream short_rows("1,0,1,3\n0,1\n");
  EXPECT_THROW(read_grid_csv(short_rows), InvalidArgument);
  std::stringstream nonconvex("1,0,1,3\n0,1,0\n");
  EXPECT_THROW(read_grid_csv(nonconvex), ConvexityViolation);
}

}  // namespace
}  // namespace lcq
