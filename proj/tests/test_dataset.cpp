/*
 * Copyright 2025 The rashaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "rashaudit/common.hpp"
#include "rashaudit/dataset.hpp"
#include "test_util.hpp"

using namespace rashaudit;
using testutil::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("load_csv parses values, names and labels") {
  TempDir tmp;
  const auto path = tmp.file("simple.csv");
  testutil::write_file(path,
                       "x,y,class\n"
                       "1.5,2.0,a\n"
                       "0.25,-1,a\n"
                       "3,4,a\n"
                       "5,6,b\n");
  const auto d = data::load_csv(path, "class");
  CHECK(d.n_samples() == 4);
  CHECK(d.n_features() == 2);
  CHECK(d.column_names == std::vector<std::string>{"x", "y"});
  CHECK(d.features(0, 0) == 1.5);
  CHECK(d.features(1, 1) == -1.0);
  // b is the minority value, so it maps to label 1.
  CHECK(d.labels == std::vector<int>{0, 0, 0, 1});
  CHECK(d.dropped_rows == 0);
}

TEST_CASE("load_csv error paths") {
  TempDir tmp;
  CHECK(code_of([&] { data::load_csv(tmp.file("absent.csv"), "class"); }) ==
        ErrorCode::kFileNotFound);

  const auto ragged = tmp.file("ragged.csv");
  testutil::write_file(ragged, "a,b,class\n1,2,x\n1,2\n");
  CHECK(code_of([&] { data::load_csv(ragged, "class"); }) == ErrorCode::kMalformedCsv);

  const auto ternary = tmp.file("ternary.csv");
  testutil::write_file(ternary, "a,class\n1,x\n2,y\n3,z\n");
  CHECK(code_of([&] { data::load_csv(ternary, "class"); }) == ErrorCode::kNotBinaryTarget);

  const auto single = tmp.file("single.csv");
  testutil::write_file(single, "a,class\n1,x\n2,x\n");
  CHECK(code_of([&] { data::load_csv(single, "class"); }) == ErrorCode::kNotBinaryTarget);

  const auto empty = tmp.file("empty.csv");
  testutil::write_file(empty, "a,class\n,x\n,y\n");
  CHECK(code_of([&] { data::load_csv(empty, "class"); }) == ErrorCode::kEmptyAfterCleaning);

  const auto no_target = tmp.file("no_target.csv");
  testutil::write_file(no_target, "a,b\n1,2\n");
  CHECK(code_of([&] { data::load_csv(no_target, "class"); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("load_csv drops rows with missing or non-finite values") {
  TempDir tmp;
  const auto path = tmp.file("missing.csv");
  testutil::write_file(path,
                       "x,y,class\n"
                       "1,2,a\n"
                       ",3,a\n"
                       "4,NA,b\n"
                       "nan,3,a\n"
                       "inf,3,b\n"
                       "5,6,b\n"
                       "7,8,a\n");
  const auto d = data::load_csv(path, "class");
  CHECK(d.n_samples() == 3);
  CHECK(d.dropped_rows == 4);
  for (double v : d.features.values) CHECK(std::isfinite(v));
}

TEST_CASE("categorical features are integer-encoded by first appearance") {
  TempDir tmp;
  const auto path = tmp.file("cats.csv");
  testutil::write_file(path,
                       "color,size,class\n"
                       "red,1,a\n"
                       "blue,2,a\n"
                       "red,3,a\n"
                       "green,4,b\n");
  const auto d = data::load_csv(path, "class");
  CHECK(d.features.column(0) == std::vector<double>{0, 1, 0, 2});

  // Reloading yields a bit-identical dataset.
  const auto d2 = data::load_csv(path, "class");
  CHECK(d.features == d2.features);
  CHECK(d.labels == d2.labels);
}

TEST_CASE("load_csv handles quoted fields and CRLF") {
  TempDir tmp;
  const auto path = tmp.file("quoted.csv");
  testutil::write_file(path,
                       "name,x,class\r\n"
                       "\"a,b\",1,m\r\n"
                       "\"say \"\"hi\"\"\",2,m\r\n"
                       "plain,3,w\r\n");
  const auto d = data::load_csv(path, "class");
  CHECK(d.n_samples() == 3);
  // The quoted strings become a categorical encoding.
  CHECK(d.features.column(0) == std::vector<double>{0, 1, 2});
}

TEST_CASE("minority class is always relabeled to 1") {
  TempDir tmp;
  const auto path = tmp.file("flip.csv");
  // "a" is the majority value even though it appears first.
  testutil::write_file(path, "x,class\n1,b\n2,a\n3,a\n4,a\n");
  const auto d = data::load_csv(path, "class");
  CHECK(d.labels == std::vector<int>{1, 0, 0, 0});

  const auto summary = data::imbalance_ratio(d);
  CHECK(summary.minority_count == 1);
  CHECK(summary.majority_count == 3);
  CHECK(summary.ratio == doctest::Approx(3.0));
}

TEST_CASE("imbalance_ratio arithmetic") {
  const auto balanced = testutil::make_dataset(5, 5, 3, 1);
  const auto s1 = data::imbalance_ratio(balanced);
  CHECK(s1.ratio == doctest::Approx(1.0));

  const auto skewed = testutil::make_dataset(8, 2, 3, 2);
  const auto s2 = data::imbalance_ratio(skewed);
  CHECK(s2.ratio == doctest::Approx(4.0));
  CHECK(s2.majority_count == 8);
  CHECK(s2.minority_count == 2);
}

TEST_CASE("stratified_split counting rule") {
  const auto d = testutil::make_dataset(100, 20, 4, 3);
  const auto split = data::stratified_split(d, 0.7, 42);

  const auto train_summary = data::imbalance_ratio(split.train);
  const auto test_summary = data::imbalance_ratio(split.test);
  CHECK(train_summary.majority_count == 70);
  CHECK(train_summary.minority_count == 14);
  CHECK(test_summary.majority_count == 30);
  CHECK(test_summary.minority_count == 6);
}

TEST_CASE("stratified_split is deterministic and partitions the rows") {
  const auto d = testutil::make_dataset(37, 11, 3, 4);
  const auto a = data::stratified_split(d, 0.7, 7);
  const auto b = data::stratified_split(d, 0.7, 7);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.features == b.test.features);
  CHECK(a.train.labels == b.train.labels);

  // Partition property: every input row appears exactly once across the two
  // partitions. Rows are unique here, so multiset equality over row
  // signatures is enough.
  auto signature = [](const data::Dataset& ds, std::size_t i) {
    std::string s = std::to_string(ds.labels[i]);
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      s += "|" + std::to_string(ds.features(i, j));
    }
    return s;
  };
  std::multiset<std::string> original;
  for (std::size_t i = 0; i < d.n_samples(); ++i) original.insert(signature(d, i));
  std::multiset<std::string> pieces;
  for (std::size_t i = 0; i < a.train.n_samples(); ++i) pieces.insert(signature(a.train, i));
  for (std::size_t i = 0; i < a.test.n_samples(); ++i) pieces.insert(signature(a.test, i));
  CHECK(original == pieces);

  // A different seed moves rows around.
  const auto c = data::stratified_split(d, 0.7, 8);
  CHECK(a.train.features != c.train.features);
}

TEST_CASE("stratified_split rejects impossible classes and bad fractions") {
  const auto tiny = testutil::make_dataset(3, 1, 2, 5);
  CHECK(code_of([&] { data::stratified_split(tiny, 0.7, 1); }) ==
        ErrorCode::kClassTooSmall);

  const auto d = testutil::make_dataset(10, 4, 2, 6);
  CHECK(code_of([&] { data::stratified_split(d, 0.4, 1); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { data::stratified_split(d, 0.96, 1); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("check_manifest compares counts exactly and ratio with tolerance") {
  auto d = testutil::make_dataset(8, 2, 3, 7);
  d.name = "fixture";

  data::ManifestEntry entry;
  entry.dataset_name = "fixture";
  entry.expected_samples = 10;
  entry.expected_variables = 3;
  entry.expected_ratio = 4.005;  // within +-0.01 of the true 4.0

  const auto report = data::check_manifest(d, entry);
  CHECK(report.all_pass);

  entry.expected_samples = 11;  // one extra row expected
  const auto report2 = data::check_manifest(d, entry);
  CHECK_FALSE(report2.all_pass);
  CHECK_FALSE(report2.fields[0].pass);  // n_samples
  CHECK(report2.fields[2].pass);        // ratio still inside tolerance

  entry.dataset_name = "other";
  CHECK(code_of([&] { data::check_manifest(d, entry); }) == ErrorCode::kNameMismatch);
}

TEST_CASE("bundled benchmark replicas match their manifest rows") {
  const std::string dir = RASHAUDIT_DATA_DIR;
  const auto manifest = data::load_manifest(dir + "/manifest.json");
  CHECK(manifest.size() == 20);

  for (const char* name : {"phoneme", "abalone", "yeast_me2"}) {
    const auto d = data::load_csv(dir + "/" + name + ".csv", "class");
    const auto it = std::find_if(manifest.begin(), manifest.end(), [&](const auto& e) {
      return e.dataset_name == name;
    });
    REQUIRE(it != manifest.end());
    const auto report = data::check_manifest(d, *it);
    CHECK(report.all_pass);
  }
}

TEST_CASE("write_csv then load_csv round-trips a dataset") {
  TempDir tmp;
  const auto d = testutil::make_dataset(12, 5, 3, 9);
  const auto path = tmp.file("roundtrip.csv");
  data::write_csv(d, "class", path);
  const auto back = data::load_csv(path, "class");
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(back.column_names == d.column_names);
}
