#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fhl/io.hpp"

using namespace fhl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("fhl_io_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Hash, KnownSha256Vectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Json, NonFiniteNumbersBecomeStrings) {
  EXPECT_EQ(number(std::nan("")), "nan");
  EXPECT_EQ(number(kInfinity), "inf");
  EXPECT_EQ(number(-kInfinity), "-inf");
  EXPECT_EQ(number(0.25), 0.25);
  EXPECT_EQ(to_json(Point::of(1.0, -2.0)).dump(), "[1.0,-2.0]");
}

TEST(Csv, FieldLayoutOneDimensional) {
  SolutionField f;
  f.grid = SpaceTimeGrid::line(0.0, 1.0, 0.5);
  f.points = {Point::of(0.0), Point::of(0.5)};
  f.times = {0.1, 0.2};
  f.values = {1.0, 2.0, 3.0, 0.1};
  std::ostringstream os;
  write_csv(os, f);
  EXPECT_EQ(os.str(), "x,t,value\n0,0.10000000000000001,1\n0,0.20000000000000001,2\n0.5,0.10000000000000001,3\n"
                      "0.5,0.20000000000000001,0.10000000000000001\n");
}

TEST(Csv, MonteCarloFieldAddsStandardErrors) {
  SolutionField f;
  f.grid = SpaceTimeGrid::square(0.0, 1.0, 1.0);
  f.points = {Point::of(0.0, 1.0)};
  f.times = {1.0};
  f.values = {-2.0};
  f.std_errors = {0.5};
  std::ostringstream os;
  write_csv(os, f);
  EXPECT_EQ(os.str(), "x,y,t,value,stderr\n0,1,1,-2,0.5\n");
}

TEST(RunOutput, ManifestHashesEveryWrittenFile) {
  const auto dir = fresh_dir("manifest");
  {
    RunOutput out(dir);
    out.config()["answer"] = 42;
    out.write("a.txt", "abc");
    out.write_json("b.json", Json{{"k", 1}});
    out.warn("careful");
    out.finish("solve", 0);
  }
  const auto m = Json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(m["command"], "solve");
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_EQ(m["config"]["answer"], 42);
  EXPECT_EQ(m["warnings"][0], "careful");
  ASSERT_EQ(m["files"].size(), 2u);
  EXPECT_EQ(m["files"][0]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  for (const auto& f : m["files"]) {
    const auto body = read_file(dir / f["path"].get<std::string>());
    EXPECT_EQ(f["sha256"], sha256_hex(body));
    EXPECT_EQ(f["bytes"], body.size());
  }
  fs::remove_all(dir);
}

TEST(RunOutput, UnwritableDirectoryIsAConfigurationError) {
  const auto dir = fresh_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(RunOutput(dir / "file" / "sub"), ValidationError);
  EXPECT_THROW(read_file(dir / "missing"), Error);
  fs::remove_all(dir);
}
