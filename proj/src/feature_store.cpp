#include "rflab/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rflab/errors.hpp"

namespace rflab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(trim(field));
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw DataError(path + ":" + std::to_string(line) + ": malformed value '" + s + "'");
  }
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int FeatureSchema::total_dim() const {
  int t = 0;
  for (int d : dims) t += d;
  return t;
}

int FeatureSchema::offset(int word) const {
  int t = 0;
  for (int c = 0; c < word; ++c) t += dims[c];
  return t;
}

void FeatureSchema::validate() const {
  if (dims.empty()) throw std::invalid_argument("schema needs at least one word space");
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("every word-space dimension must be >= 1");
  }
}

QueryPoint QueryPoint::zeros(const FeatureSchema& schema) {
  QueryPoint q;
  q.words.reserve(schema.dims.size());
  for (int d : schema.dims) q.words.emplace_back(d, 0.0);
  return q;
}

std::vector<double> QueryPoint::flat() const {
  std::vector<double> out;
  for (const auto& w : words) out.insert(out.end(), w.begin(), w.end());
  return out;
}

void QueryPoint::validate(const FeatureSchema& schema) const {
  if (static_cast<int>(words.size()) != schema.word_count()) {
    throw std::invalid_argument("query word count does not match schema");
  }
  for (int c = 0; c < schema.word_count(); ++c) {
    if (static_cast<int>(words[c].size()) != schema.dims[c]) {
      throw std::invalid_argument("query word " + std::to_string(c + 1) +
                                  " does not match schema dimension");
    }
  }
}

void FeedbackSet::validate() const {
  for (const auto& [id, w] : positives) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw std::invalid_argument("relevance weight for '" + id + "' outside [0,1]");
    }
  }
  for (const auto& n : negatives) {
    for (const auto& [p, w] : positives) {
      if (p == n) throw std::invalid_argument("item '" + n + "' is both positive and negative");
    }
  }
}

Dataset::Dataset(FeatureSchema schema) : schema_(std::move(schema)) { schema_.validate(); }

void Dataset::add_item(std::string id, std::string category, std::vector<double> features,
                       int source_line) {
  const std::string where =
      source_line >= 0 ? "row " + std::to_string(source_line) + ": " : "";
  if (static_cast<int>(features.size()) != schema_.total_dim()) {
    throw DataError(where + "expected " + std::to_string(schema_.total_dim()) +
                    " feature values, got " + std::to_string(features.size()));
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw DataError(where + "non-finite feature value in '" + id + "'");
  }
  if (index_.contains(id)) throw DataError(where + "duplicate item id '" + id + "'");
  index_.emplace(id, size());
  ids_.push_back(std::move(id));
  categories_.push_back(std::move(category));
  features_.insert(features_.end(), features.begin(), features.end());
}

std::span<const double> Dataset::row(int a) const {
  const int t = schema_.total_dim();
  return {features_.data() + static_cast<size_t>(a) * t, static_cast<size_t>(t)};
}

std::span<const double> Dataset::word(int a, int c) const {
  const auto r = row(a);
  return r.subspan(schema_.offset(c), schema_.dims[c]);
}

int Dataset::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown item id '" + id + "'");
  return it->second;
}

std::map<std::string, std::vector<int>> Dataset::by_category() const {
  std::map<std::string, std::vector<int>> out;
  for (int a = 0; a < size(); ++a) out[categories_[a]].push_back(a);
  return out;
}

FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  FeatureSchema schema;
  int declared_words = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "words") {
      declared_words = static_cast<int>(parse_double(value, path, line_no));
    } else if (key == "dims") {
      std::istringstream vs(value);
      int d = 0;
      while (vs >> d) schema.dims.push_back(d);
    } else {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (schema.dims.empty()) throw DataError(path + ": schema is missing 'dims'");
  if (declared_words >= 0 && declared_words != schema.word_count()) {
    throw DataError(path + ": 'words' does not match the number of entries in 'dims'");
  }
  schema.validate();
  return schema;
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schema file '" + path + "'");
  out << "words = " << schema.word_count() << "\n";
  out << "dims =";
  for (int d : schema.dims) out << ' ' << d;
  out << "\n";
}

Dataset load_dataset(const std::string& path, const FeatureSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  Dataset dataset(schema);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    const auto fields = split(content, ',');
    if (!header_seen) {
      // Header: id, category, word_c:dim per space.
      if (fields.size() != static_cast<size_t>(schema.word_count()) + 2 ||
          fields[0] != "id" || fields[1] != "category") {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": bad header, expected 'id,category,word_1:M_1,...'");
      }
      for (int c = 0; c < schema.word_count(); ++c) {
        const std::string expect =
            "word_" + std::to_string(c + 1) + ":" + std::to_string(schema.dims[c]);
        if (fields[c + 2] != expect) {
          throw DataError(path + ":" + std::to_string(line_no) + ": header names '" +
                          fields[c + 2] + "' where schema expects '" + expect + "'");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != static_cast<size_t>(schema.total_dim()) + 2) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.total_dim() + 2) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> values;
    values.reserve(schema.total_dim());
    for (size_t f = 2; f < fields.size(); ++f) {
      values.push_back(parse_double(fields[f], path, line_no));
    }
    try {
      dataset.add_item(fields[0], fields[1], std::move(values), line_no);
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::string(e.what()));
    }
  }
  if (dataset.size() == 0) throw DataError("empty dataset: '" + path + "'");
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path,
                  const std::vector<std::string>& header_comments) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file '" + path + "'");
  for (const auto& c : header_comments) out << "# " << c << "\n";
  out << "id,category";
  for (int c = 0; c < dataset.schema().word_count(); ++c) {
    out << ",word_" << (c + 1) << ":" << dataset.schema().dims[c];
  }
  out << "\n";
  for (int a = 0; a < dataset.size(); ++a) {
    out << dataset.id(a) << ',' << dataset.category(a);
    for (double v : dataset.row(a)) out << ',' << fmt_double(v);
    out << "\n";
  }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.schema.validate();
  if (spec.categories < 1) throw std::invalid_argument("categories must be >= 1");
  if (spec.per_category < 1) throw std::invalid_argument("per_category must be >= 1");
  if (spec.separation < 0.0) throw std::invalid_argument("separation must be >= 0");
  if (!(spec.noise > 0.0)) throw std::invalid_argument("noise must be > 0");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> spread(-1.0, 1.0);
  const int words = spec.schema.word_count();
  const int total = spec.schema.total_dim();

  Dataset dataset(spec.schema);
  int item_no = 0;
  char buf[32];
  for (int cat = 0; cat < spec.categories; ++cat) {
    std::vector<double> center(total);
    for (double& v : center) v = spec.separation * n01(rng);
    // Each category gets its own spherical scale per word space (noise is the
    // geometric-mean scale, spread a factor of 2 either way). Uniform scales
    // would leave the metric-adapting schemes nothing to adapt to.
    std::vector<double> scale(words);
    for (double& s : scale) s = spec.noise * std::exp2(spread(rng));
    std::snprintf(buf, sizeof buf, "cat_%04d", cat);
    const std::string category = buf;
    for (int i = 0; i < spec.per_category; ++i) {
      std::vector<double> features(total);
      int d = 0;
      for (int c = 0; c < words; ++c) {
        for (int j = 0; j < spec.schema.dims[c]; ++j, ++d) {
          features[d] = center[d] + scale[c] * n01(rng);
        }
      }
      std::snprintf(buf, sizeof buf, "i%06d", item_no++);
      dataset.add_item(buf, category, std::move(features));
    }
  }
  return dataset;
}

}  // namespace rflab
