#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/builders.h"
#include "support/large_ward.h"
#include "txtree/data_model.h"

namespace txtree {

namespace fs = std::filesystem;

class Data_model_test : public testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("txtree_dm_" + std::string{testing::UnitTest::GetInstance()->current_test_info()->name()});
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  void write(const std::string& name, const std::string& body) {
    auto out = std::ofstream{dir / name};
    out << body;
  }

  auto slurp(const fs::path& p) -> std::string {
    auto in = std::ifstream{p};
    auto ss = std::stringstream{};
    ss << in.rdbuf();
    return ss.str();
  }

  void write_small(const std::string& distances) {
    write("episodes.csv", "patient_id,admit_day,discharge_day\nA,0,5\nB,2,8\nC,3,4\n");
    write("screens.csv", "patient_id,day,result\nA,3,pos\nA,0,neg\nB,2,pos\nC,3,neg\n");
    write("isolates.csv", "isolate_id,patient_id,day\nx1,A,3\nx2,B,2\n");
    write("distances.csv", distances);
  }
};

TEST_F(Data_model_test, empty_genetic_data) {
  write("episodes.csv", "patient_id,admit_day,discharge_day\nA,0,5\nB,2,8\nC,3,4\n");
  write("screens.csv", "patient_id,day,result\nA,1,neg\n");
  write("isolates.csv", "isolate_id,patient_id,day\n");
  write("distances.csv", "isolate_a,isolate_b,snps\n");
  auto d = load_dataset_dir(dir);
  EXPECT_EQ(d.num_patients(), 3);
  EXPECT_EQ(d.num_isolates(), 0);
  EXPECT_EQ(d.distances.size(), 0);
  EXPECT_EQ(d.first_day, 0);
  EXPECT_EQ(d.last_day, 8);
}

TEST_F(Data_model_test, screens_sorted_and_cross_referenced) {
  write_small("isolate_a,isolate_b,snps\nx2,x1,7\n");
  auto d = load_dataset_dir(dir);
  ASSERT_EQ(d.episodes[0].screens.size(), 2u);
  EXPECT_EQ(d.episodes[0].screens[0].day, 0);
  EXPECT_EQ(d.episodes[0].screens[1].day, 3);
  EXPECT_EQ(d.isolates[1].host, 1);
  EXPECT_EQ(d.distances.at(0, 1), 7);
  EXPECT_EQ(d.distances.at(1, 0), 7);
  EXPECT_EQ(d.first_positive_day[0], 3);
  EXPECT_FALSE(d.has_positive(2));
}

TEST_F(Data_model_test, screen_before_admission_rejected) {
  write("episodes.csv", "patient_id,admit_day,discharge_day\nA,4,9\n");
  write("screens.csv", "patient_id,day,result\nA,2,neg\n");
  write("isolates.csv", "isolate_id,patient_id,day\n");
  write("distances.csv", "isolate_a,isolate_b,snps\n");
  try {
    load_dataset_dir(dir);
    FAIL() << "expected a validation error";
  } catch (const Validation_error& e) {
    EXPECT_NE(std::string{e.what()}.find("'A'"), std::string::npos) << e.what();
  }
}

TEST_F(Data_model_test, malformed_rows_are_parse_errors) {
  write_small("isolate_a,isolate_b,snps\nx1,x2,3\n");
  write("episodes.csv", "patient_id,admit_day,discharge_day\nA,zero,5\nB,2,8\nC,3,4\n");
  EXPECT_THROW(load_dataset_dir(dir), Parse_error);
  write("episodes.csv", "patient_id,admit_day,discharge_day\nA,0\nB,2,8\nC,3,4\n");
  EXPECT_THROW(load_dataset_dir(dir), Parse_error);
}

TEST_F(Data_model_test, asymmetric_dense_matrix_rejected) {
  write_small("isolate_id,x1,x2\nx1,0,4\nx2,5,0\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
}

TEST_F(Data_model_test, negative_distance_rejected) {
  write_small("isolate_id,x1,x2\nx1,0,-1\nx2,-1,0\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
  write_small("isolate_a,isolate_b,snps\nx1,x2,-3\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
}

TEST_F(Data_model_test, sparse_list_must_cover_every_pair_once) {
  write("episodes.csv", "patient_id,admit_day,discharge_day\nA,0,5\nB,2,8\nC,3,4\n");
  write("screens.csv", "patient_id,day,result\nA,3,pos\nB,2,pos\nC,3,pos\n");
  write("isolates.csv", "isolate_id,patient_id,day\nx1,A,3\nx2,B,2\nx3,C,3\n");
  write("distances.csv", "isolate_a,isolate_b,snps\nx1,x2,1\nx1,x3,2\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
  write("distances.csv", "isolate_a,isolate_b,snps\nx1,x2,1\nx2,x1,1\nx1,x3,2\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
}

TEST_F(Data_model_test, dangling_isolate_rejected) {
  write_small("isolate_a,isolate_b,snps\nx1,x2,3\n");
  write("isolates.csv", "isolate_id,patient_id,day\nx1,A,3\nx2,Z,2\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
}

TEST_F(Data_model_test, isolate_must_match_positive_screen) {
  write_small("isolate_a,isolate_b,snps\nx1,x2,3\n");
  write("isolates.csv", "isolate_id,patient_id,day\nx1,A,0\nx2,B,2\n");
  EXPECT_THROW(load_dataset_dir(dir), Validation_error);
}

TEST_F(Data_model_test, round_trip_is_byte_identical) {
  write_small("isolate_a,isolate_b,snps\nx2,x1,7\n");
  auto d = load_dataset_dir(dir);
  auto first = dir / "first";
  auto second = dir / "second";
  write_dataset(d, first);
  write_dataset(load_dataset_dir(first), second);
  for (auto name : {"episodes.csv", "screens.csv", "isolates.csv", "distances.csv"}) {
    EXPECT_EQ(slurp(first / name), slurp(second / name)) << name;
  }
  write_dataset(d, dir / "sparse", Distance_layout::sparse);
  auto reread = load_dataset_dir(dir / "sparse");
  EXPECT_EQ(reread.distances, d.distances);
}

TEST(Observed_positive_set, all_negative_is_empty) {
  auto d = txtree_test::make_dataset({{"A", 0, 3, {{0, false}, {3, false}}}});
  EXPECT_TRUE(observed_positive_set(d).empty());
}

TEST(Observed_positive_set, single_positive) {
  auto d = txtree_test::make_dataset({{"A", 0, 3, {{0, false}}}, {"B", 1, 2, {{2, true}}}});
  EXPECT_EQ(observed_positive_set(d), std::vector<std::string>{"B"});
}

TEST(Observed_positive_set, large_ward_shape) {
  auto d = txtree_test::large_ward();
  EXPECT_EQ(d.num_patients(), 1108);
  EXPECT_EQ(d.num_days(), 450);
  EXPECT_EQ(d.num_isolates(), 18);
  EXPECT_EQ(observed_positive_set(d).size(), 20u);
}

TEST(Observed_positive_set, deterministic_order) {
  auto d = txtree_test::make_dataset(
      {{"b", 0, 3, {{0, true}}}, {"a", 0, 3, {{1, true}}}, {"c", 0, 3, {{2, true}}}});
  EXPECT_EQ(observed_positive_set(d), (std::vector<std::string>{"a", "b", "c"}));
}

}  // namespace txtree
