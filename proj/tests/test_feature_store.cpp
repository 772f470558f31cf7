#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "rflab/errors.hpp"
#include "rflab/feature_store.hpp"
#include "rflab/kernels.hpp"

using namespace rflab;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("schema validation") {
  FeatureSchema empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  FeatureSchema zero_dim{{2, 0}};
  CHECK_THROWS_AS(zero_dim.validate(), std::invalid_argument);
  FeatureSchema s{{2, 3}};
  s.validate();
  CHECK(s.word_count() == 2);
  CHECK(s.total_dim() == 5);
  CHECK(s.offset(0) == 0);
  CHECK(s.offset(1) == 2);
}

TEST_CASE("load_dataset keeps row order and count") {
  const std::string path = temp_path("rflab_load3.csv");
  write_file(path,
             "# comment\n"
             "id,category,word_1:2,word_2:3\n"
             "a,cat1,1,2,3,4,5\n"
             "b,cat1,0,0,0,0,0\n"
             "c,cat2,-1,-2,-3,-4,-5\n");
  const Dataset d = load_dataset(path, FeatureSchema{{2, 3}});
  CHECK(d.size() == 3);
  CHECK(d.id(0) == "a");
  CHECK(d.id(2) == "c");
  CHECK(d.category(2) == "cat2");
  CHECK(d.word(0, 1)[2] == 5.0);
  CHECK(d.index_of("b") == 1);
  CHECK_THROWS_AS(d.index_of("nope"), DataError);
}

TEST_CASE("empty dataset file is rejected") {
  const std::string path = temp_path("rflab_empty.csv");
  write_file(path, "");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{2, 3}}),
                       doctest::Contains("empty dataset"), DataError);
  // Header only still counts as empty.
  write_file(path, "id,category,word_1:2,word_2:3\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{2, 3}}),
                       doctest::Contains("empty dataset"), DataError);
}

TEST_CASE("schema errors name the offending row") {
  const std::string path = temp_path("rflab_badrow.csv");
  write_file(path,
             "id,category,word_1:2,word_2:3\n"
             "a,cat1,1,2,3,4,5\n"
             "b,cat1,1,2,3,4\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{2, 3}}), doctest::Contains(":3:"),
                       DataError);
}

TEST_CASE("malformed and non-finite values are rejected") {
  const std::string path = temp_path("rflab_badval.csv");
  write_file(path,
             "id,category,word_1:1\n"
             "a,cat1,zzz\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{1}}), doctest::Contains("malformed"),
                       DataError);
  write_file(path,
             "id,category,word_1:1\n"
             "a,cat1,inf\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{1}}),
                       doctest::Contains("non-finite"), DataError);
}

TEST_CASE("duplicate ids are rejected") {
  const std::string path = temp_path("rflab_dup.csv");
  write_file(path,
             "id,category,word_1:1\n"
             "a,cat1,1\n"
             "a,cat1,2\n");
  CHECK_THROWS_WITH_AS(load_dataset(path, FeatureSchema{{1}}), doctest::Contains("duplicate"),
                       DataError);
}

TEST_CASE("header must match the schema") {
  const std::string path = temp_path("rflab_badhdr.csv");
  write_file(path,
             "id,category,word_1:4\n"
             "a,cat1,1,2,3,4\n");
  CHECK_THROWS_AS(load_dataset(path, FeatureSchema{{2, 2}}), DataError);
}

TEST_CASE("schema sidecar round trip") {
  const std::string path = temp_path("rflab_schema.txt");
  const FeatureSchema schema{{8, 8, 8, 8}};
  save_schema(schema, path);
  CHECK(load_schema(path) == schema);
}

TEST_CASE("dataset save/load round trip") {
  SyntheticSpec spec;
  spec.categories = 3;
  spec.per_category = 4;
  spec.schema = FeatureSchema{{2, 3}};
  spec.separation = 2.0;
  spec.noise = 0.5;
  spec.seed = 99;
  const Dataset d = generate_synthetic(spec);
  const std::string path = temp_path("rflab_roundtrip.csv");
  save_dataset(d, path);
  const Dataset d2 = load_dataset(path, spec.schema);
  REQUIRE(d2.size() == d.size());
  for (int a = 0; a < d.size(); ++a) {
    CHECK(d2.id(a) == d.id(a));
    CHECK(d2.category(a) == d.category(a));
    const auto r1 = d.row(a);
    const auto r2 = d2.row(a);
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
  }
}

TEST_CASE("synthetic generation is deterministic under the seed") {
  SyntheticSpec spec;
  spec.categories = 40;
  spec.per_category = 50;
  spec.schema = FeatureSchema{{4, 4}};
  spec.seed = 7;
  const Dataset a = generate_synthetic(spec);
  const Dataset b = generate_synthetic(spec);
  REQUIRE(a.size() == 2000);
  REQUIRE(b.size() == 2000);
  for (int i = 0; i < a.size(); ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    for (size_t d = 0; d < ra.size(); ++d) CHECK(ra[d] == rb[d]);
  }

  spec.seed = 8;
  const Dataset c = generate_synthetic(spec);
  bool any_diff = false;
  for (size_t d = 0; d < a.row(0).size(); ++d) any_diff |= a.row(0)[d] != c.row(0)[d];
  CHECK(any_diff);
}

TEST_CASE("category sizes are exactly per_category") {
  SyntheticSpec spec;
  spec.categories = 7;
  spec.per_category = 13;
  spec.schema = FeatureSchema{{3}};
  spec.seed = 3;
  const Dataset d = generate_synthetic(spec);
  const auto groups = d.by_category();
  CHECK(groups.size() == 7);
  for (const auto& [name, rows] : groups) CHECK(rows.size() == 13);
}

TEST_CASE("separation zero collapses the category structure") {
  SyntheticSpec spec;
  spec.categories = 6;
  spec.per_category = 30;
  spec.schema = FeatureSchema{{4}};
  spec.separation = 0.0;
  spec.noise = 1.0;
  spec.seed = 21;
  const Dataset d = generate_synthetic(spec);

  // Mean squared distance within vs between categories: with identical
  // centers the two must coincide up to sampling noise.
  double within = 0.0, between = 0.0;
  int n_within = 0, n_between = 0;
  for (int a = 0; a < d.size(); ++a) {
    for (int b = a + 1; b < d.size(); ++b) {
      const double d2 = kernels::squared_distance(d.row(a), d.row(b));
      if (d.category(a) == d.category(b)) {
        within += d2;
        ++n_within;
      } else {
        between += d2;
        ++n_between;
      }
    }
  }
  within /= n_within;
  between /= n_between;
  CHECK(between / within == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("large separation gives near-perfect centroid classification") {
  SyntheticSpec spec;
  spec.categories = 10;
  spec.per_category = 40;
  spec.schema = FeatureSchema{{4, 4}};
  spec.separation = 10.0;
  spec.noise = 1.0;
  spec.seed = 5;
  const Dataset d = generate_synthetic(spec);
  CHECK(oracles::centroid_accuracy(d) > 0.99);
}

TEST_CASE("generator precondition violations") {
  SyntheticSpec spec;
  spec.categories = 1;
  spec.per_category = 1;
  spec.schema = FeatureSchema{{1}};
  spec.noise = 0.0;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  spec.noise = 1.0;
  spec.separation = -1.0;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
  spec.separation = 0.0;
  spec.categories = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}

TEST_CASE("feedback set validation") {
  FeedbackSet fb;
  fb.positives = {{"a", 0.5}, {"b", 1.0}};
  fb.negatives = {"c"};
  fb.validate();
  fb.negatives.push_back("a");
  CHECK_THROWS_AS(fb.validate(), std::invalid_argument);
  fb.negatives.pop_back();
  fb.positives.push_back({"d", 1.5});
  CHECK_THROWS_AS(fb.validate(), std::invalid_argument);
}

TEST_CASE("query point validation") {
  const FeatureSchema schema{{2, 3}};
  QueryPoint q = QueryPoint::zeros(schema);
  q.validate(schema);
  CHECK(q.flat().size() == 5);
  q.words[1].pop_back();
  CHECK_THROWS_AS(q.validate(schema), std::invalid_argument);
}
