#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "memdyn/csv.hpp"
#include "memdyn/trajectory_io.hpp"

using namespace memdyn;

TEST(Columnar, RoundTrip)
{
  const auto path = (std::filesystem::temp_directory_path() / "memdyn_columnar_test.bin").string();
  ColumnarHeader h;
  h.params_hash = 0x1234abcdULL;
  h.dt = 5e-7;
  h.decimation = 25;
  h.seed = 7;
  h.aux = 3.5;
  h.columns = {"t", "re", "im"};
  {
    ColumnarWriter w(path, h);
    for (int k = 0; k < 10; ++k) {
      w.row({k * 0.5, k * 1.0 / 3.0, -k * 1e-300});
    }
  }
  const auto d = read_columnar(path);
  EXPECT_EQ(d.header.rows, 10u);
  EXPECT_EQ(d.header.columns, h.columns);
  EXPECT_EQ(d.header.params_hash, h.params_hash);
  EXPECT_EQ(d.header.dt, h.dt);
  EXPECT_EQ(d.header.seed, 7u);
  EXPECT_EQ(d.at(9, 1), 9.0 / 3.0);
  EXPECT_EQ(d.at(4, 2), -4e-300);
  std::filesystem::remove(path);
}

TEST(Columnar, RejectsForeignFile)
{
  const auto path = (std::filesystem::temp_directory_path() / "memdyn_not_columnar.bin").string();
  std::ofstream(path) << "hello world, not a trajectory";
  EXPECT_THROW(read_columnar(path), std::ios_base::failure);
  std::filesystem::remove(path);
}

TEST(Csv, RoundTripPrecision)
{
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(fmt(x)), x);
}
