#include "ubmat/errors.hpp"
#include "ubmat/io.hpp"
#include "ubmat/report.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <system_error>

namespace {

using namespace ubmat;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ubmat_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CoordinatesJson, RoundTrip) {
  const UBMatrix x = support::worked_instance();
  const io::Json j = io::coordinates_to_json(x);
  EXPECT_EQ(j.dump(), R"({"partition":[2,3],"a":[1.0,2.0],"b":[[0.5,0.2],[0.2,0.3]]})");
  EXPECT_EQ(io::coordinates_from_json(j), x);
  support::InstanceGenerator gen(81);
  for (int t = 0; t < 20; ++t) {
    const UBMatrix y = gen.spd(gen.partition());
    const UBMatrix back = io::coordinates_from_json(io::coordinates_to_json(y));
    EXPECT_LE((back.a() - y.a()).cwiseAbs().maxCoeff(), 1e-14 * y.a().cwiseAbs().maxCoeff());
    EXPECT_LE((back.b() - y.b()).cwiseAbs().maxCoeff(), 1e-14 * y.b().cwiseAbs().maxCoeff());
  }
}

TEST(CoordinatesJson, Malformed) {
  EXPECT_THROW(io::coordinates_from_json(io::parse_json(
                   R"({"partition":[2,2],"a":[1,1],"b":[[0.5,0.2],[0.1,0.3]]})")),
               InvalidInput);
  EXPECT_THROW(io::coordinates_from_json(io::parse_json(
                   R"({"partition":[2,2],"a":[1],"b":[[0.5,0.2],[0.2,0.3]]})")),
               InvalidInput);
  EXPECT_THROW(io::coordinates_from_json(io::parse_json(R"({"a":[1]})")), InvalidInput);
  EXPECT_THROW(io::coordinates_from_json(io::parse_json(
                   R"({"partition":[2.5],"a":[1],"b":[[0.5]]})")),
               InvalidInput);
}

TEST(ParseJson, ReportsLineAndColumn) {
  try {
    io::parse_json("{\n  \"a\": [1,\n  2,, 3]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 5u);
  }
}

TEST(DenseCsv, RoundTripAndErrors) {
  const DenseMatrix m = expand(support::worked_instance());
  EXPECT_EQ(io::parse_dense_csv(io::dense_to_csv(m)), m);
  try {
    io::parse_dense_csv("1,2\n3,x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  try {
    io::parse_dense_csv("1,2\n\n3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(io::parse_dense_csv("\n\n"), ParseError);
}

TEST(DatasetCsv, PlainHeaderAndLabels) {
  const Partition p({2, 2});
  const Dataset plain = io::parse_dataset_csv("1,2,3,4\n5,6,7,8\n", p);
  EXPECT_EQ(plain.rows(), 2);
  EXPECT_FALSE(plain.grouped());
  EXPECT_EQ(plain.observations()(1, 3), 8.0);

  io::DatasetCsvOptions named{.header = true, .label_column = "g"};
  const Dataset byname =
      io::parse_dataset_csv("x,g,y,z,w\n1,1,2,3,4\n5,2,6,7,8\n9,2,10,11,12\n", p, named);
  ASSERT_TRUE(byname.grouped());
  EXPECT_EQ(byname.labels(), (std::vector<int>{1, 2, 2}));
  EXPECT_EQ(byname.observations()(2, 0), 9.0);
  EXPECT_EQ(byname.observations()(2, 3), 12.0);

  io::DatasetCsvOptions indexed{.label_column = "5"};
  const Dataset byindex = io::parse_dataset_csv("1,2,3,4,1\n5,6,7,8,2\n", p, indexed);
  EXPECT_EQ(byindex.labels(), (std::vector<int>{1, 2}));

  const Dataset byfile =
      io::parse_dataset_csv("1,2,3,4\n5,6,7,8\n9,10,11,12\n", p, {}, "1\n2\n1\n");
  EXPECT_EQ(byfile.labels(), (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(io::parse_dataset_csv(io::dataset_to_csv(byfile, false), p, {}, "1\n2\n1\n")
                .observations(),
            byfile.observations());
}

TEST(DatasetCsv, Errors) {
  const Partition p({2, 2});
  EXPECT_THROW(io::parse_dataset_csv("1,2,3\n4,5,6\n", p), ParseError);
  EXPECT_THROW(io::parse_dataset_csv("1,2,3,4,1.5\n5,6,7,8,2\n", p, {.label_column = "5"}),
               ParseError);
  EXPECT_THROW(io::parse_dataset_csv("a,b,c,d\n1,2,3,4\n5,6,7,8\n", p,
                                     {.header = true, .label_column = "g"}),
               InvalidInput);
  EXPECT_THROW(io::parse_dataset_csv("1,2,3,4\n5,6,7,8\n", p, {}, "1\n"), InvalidInput);
  EXPECT_THROW(io::parse_dataset_csv("1,2,3,4\n5,6,7,8\n", p, {}, "1\n3\n"), InvalidInput);
  EXPECT_THROW(io::parse_dataset_csv("1,2,3,4\n", p), InvalidInput);
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemp) {
  const fs::path path = scratch("atomic.txt");
  io::write_text_atomic(path.string(), "first\n");
  io::write_text_atomic(path.string(), "second\n");
  EXPECT_EQ(io::read_text(path.string()), "second\n");
  for (const auto& entry : fs::directory_iterator(path.parent_path()))
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos);
  EXPECT_THROW(io::write_text_atomic((path.parent_path() / "missing" / "x").string(), "x"),
               std::system_error);
  EXPECT_THROW(io::read_text((path.parent_path() / "missing.txt").string()), std::system_error);
}

TEST(PlanJson, RoundTrip) {
  SimulationPlan plan{.kind = PlanKind::m_sample, .sigma = support::worked_instance()};
  plan.means = {Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(5)};
  plan.sizes = {20, 25};
  plan.replicates = 50;
  plan.seed = 9;
  plan.method = Method::morrison;
  const io::Json j = io::plan_to_json(plan);
  const SimulationPlan back = io::plan_from_json(j);
  EXPECT_EQ(io::plan_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.kind, PlanKind::m_sample);
  EXPECT_EQ(back.sizes, plan.sizes);
  EXPECT_EQ(back.method, Method::morrison);
}

}  // namespace
