#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rflab {

// Layout of the multi-word feature space: W word spaces, word c has dims[c]
// dimensions. Items are stored flat, one word after another.
struct FeatureSchema {
  std::vector<int> dims;

  int word_count() const { return static_cast<int>(dims.size()); }
  int total_dim() const;
  int offset(int word) const;
  void validate() const;  // throws std::invalid_argument
  bool operator==(const FeatureSchema&) const = default;
};

// A query is one vector per word space.
struct QueryPoint {
  std::vector<std::vector<double>> words;

  static QueryPoint zeros(const FeatureSchema& schema);
  std::vector<double> flat() const;
  void validate(const FeatureSchema& schema) const;
};

// Positive item ids with relevance weights in [0,1], plus optional negatives.
struct FeedbackSet {
  std::vector<std::pair<std::string, double>> positives;
  std::vector<std::string> negatives;

  void validate() const;  // weight range + positive/negative disjointness
};

// Immutable after construction; safe for concurrent reads.
class Dataset {
 public:
  explicit Dataset(FeatureSchema schema);

  void add_item(std::string id, std::string category, std::vector<double> features,
                int source_line = -1);

  int size() const { return static_cast<int>(ids_.size()); }
  const FeatureSchema& schema() const { return schema_; }
  std::span<const double> row(int a) const;
  std::span<const double> word(int a, int c) const;
  const std::string& id(int a) const { return ids_[a]; }
  const std::string& category(int a) const { return categories_[a]; }
  int index_of(const std::string& id) const;  // throws DataError if unknown

  // Category -> member row indices, deterministically ordered.
  std::map<std::string, std::vector<int>> by_category() const;

 private:
  FeatureSchema schema_;
  std::vector<double> features_;  // size x total_dim, row-major
  std::vector<std::string> ids_;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, int> index_;
};

FeatureSchema load_schema(const std::string& path);
void save_schema(const FeatureSchema& schema, const std::string& path);

// Dataset file: '#' comment lines, then a header row
// `id,category,word_1:M_1,...,word_W:M_W`, then one item per row.
Dataset load_dataset(const std::string& path, const FeatureSchema& schema);
void save_dataset(const Dataset& dataset, const std::string& path,
                  const std::vector<std::string>& header_comments = {});

struct SyntheticSpec {
  int categories = 0;
  int per_category = 0;
  FeatureSchema schema;
  double separation = 1.0;
  double noise = 1.0;
  uint64_t seed = 0;
};

// Spherical Gaussian per category per word space; deterministic under seed.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace rflab
