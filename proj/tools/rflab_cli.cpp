#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rflab/classic_feedback.hpp"
#include "rflab/errors.hpp"
#include "rflab/eval_harness.hpp"
#include "rflab/feature_store.hpp"
#include "rflab/methods.hpp"
#include "rflab/riemann_feedback.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(std::stoi(field));
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(std::stod(field));
  return out;
}

std::vector<std::string> parse_name_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (!field.empty()) out.push_back(field);
  }
  return out;
}

rflab::FeedbackSet load_feedback(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rflab::DataError("cannot open feedback file '" + path + "'");
  rflab::FeedbackSet feedback;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id) || id[0] == '#') continue;
    double weight = 1.0;
    fields >> weight;
    feedback.positives.emplace_back(id, weight);
  }
  if (feedback.positives.empty()) {
    throw rflab::DataError("feedback file '" + path + "' lists no items");
  }
  return feedback;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw rflab::DataError("cannot write '" + path + "'");
  return out;
}

struct CommonOptions {
  std::string dataset;
  std::string schema;
  double alpha = 0.5;
  int topics = 3;
  double epsilon = 1e-6;
  uint64_t seed = 0;
};

rflab::Dataset load(const CommonOptions& opt) {
  const std::string schema_path = opt.schema.empty() ? opt.dataset + ".schema" : opt.schema;
  return rflab::load_dataset(opt.dataset, rflab::load_schema(schema_path));
}

rflab::MethodParams method_params(const CommonOptions& opt) {
  rflab::MethodParams params;
  params.alpha = opt.alpha;
  params.topics = opt.topics;
  params.epsilon = opt.epsilon;
  params.em.restarts = 2;
  return params;
}

int cmd_synth(int categories, int per_category, const std::string& dims_csv,
              double separation, double noise, uint64_t seed, const std::string& out_path) {
  rflab::SyntheticSpec spec;
  spec.categories = categories;
  spec.per_category = per_category;
  spec.schema.dims = parse_int_list(dims_csv);
  spec.separation = separation;
  spec.noise = noise;
  spec.seed = seed;
  const rflab::Dataset dataset = rflab::generate_synthetic(spec);

  std::vector<std::string> header{
      "command = synth",
      "categories = " + std::to_string(categories),
      "per_category = " + std::to_string(per_category),
      "dims = " + dims_csv,
      "separation = " + std::to_string(separation),
      "noise = " + std::to_string(noise),
      "seed = " + std::to_string(seed),
  };
  rflab::save_dataset(dataset, out_path, header);
  rflab::save_schema(spec.schema, out_path + ".schema");
  std::cout << "wrote " << dataset.size() << " items to " << out_path << "\n";
  return 0;
}

int cmd_xi_table(double alpha, double x_min, double x_max, double step,
                 const std::string& out_path) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("--alpha must lie in (0,1)");
  }
  if (!(step > 0.0) || x_max < x_min) {
    throw std::invalid_argument("need step > 0 and x-max >= x-min");
  }
  const rflab::XiTable table = rflab::build_xi_table(alpha);
  auto out = open_out(out_path);
  out << "# command = xi-table\n# alpha = " << alpha << "\n# x_min = " << x_min
      << "\n# x_max = " << x_max << "\n# step = " << step << "\n";
  out << "x,xi\n";
  char buf[80];
  for (double x = x_min; x <= x_max + 0.5 * step; x += step) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", x, rflab::xi(x, table));
    out << buf;
  }
  std::cout << "wrote xi table to " << out_path << "\n";
  return 0;
}

int cmd_score(const CommonOptions& opt, const std::string& method_name,
              const std::string& feedback_path, int q, const std::string& out_path) {
  const rflab::Dataset dataset = load(opt);
  if (q < 1 || q > dataset.size()) {
    throw rflab::DataError("q = " + std::to_string(q) + " exceeds the dataset size " +
                           std::to_string(dataset.size()));
  }
  const rflab::FeedbackSet feedback = load_feedback(feedback_path);
  const auto method = rflab::make_method(method_name, method_params(opt));

  std::vector<int> universe(dataset.size());
  std::iota(universe.begin(), universe.end(), 0);
  const std::vector<double> scores =
      method->score_universe(dataset, universe, feedback, opt.seed);
  const std::vector<std::string> ranked = rflab::rank(dataset, scores, q);

  auto out = open_out(out_path);
  out << "# command = score\n# dataset = " << opt.dataset << "\n# method = " << method_name
      << "\n# feedback = " << feedback_path << "\n# q = " << q << "\n# alpha = " << opt.alpha
      << "\n# topics = " << opt.topics << "\n# epsilon = " << opt.epsilon
      << "\n# seed = " << opt.seed << "\n";
  out << "rank,id,score\n";
  char buf[80];
  for (size_t i = 0; i < ranked.size(); ++i) {
    const int row = dataset.index_of(ranked[i]);
    std::snprintf(buf, sizeof buf, "%zu,%s,%.10g\n", i + 1, ranked[i].c_str(), scores[row]);
    out << buf;
  }
  std::cout << "wrote top " << q << " ranking to " << out_path << "\n";
  return 0;
}

int cmd_benchmark(const CommonOptions& opt, const std::string& methods_csv,
                  const std::string& kbar_csv, const std::string& r_csv, int q, int reps,
                  bool exclude_feedback, const std::string& out_prefix) {
  const rflab::Dataset dataset = load(opt);

  const std::vector<std::string> names =
      methods_csv.empty() ? rflab::default_benchmark_methods() : parse_name_list(methods_csv);
  const auto owned = rflab::make_methods(names, method_params(opt));
  std::vector<const rflab::Method*> methods;
  for (const auto& m : owned) methods.push_back(m.get());

  rflab::BenchmarkConfig config;
  if (!kbar_csv.empty()) config.kbars = parse_double_list(kbar_csv);
  if (!r_csv.empty()) config.rs = parse_int_list(r_csv);
  config.q = q;
  config.repetitions = reps;
  config.seed = opt.seed;
  config.exclude_feedback = exclude_feedback;

  const rflab::Report report = rflab::run_benchmark(dataset, methods, config);

  const std::string extra = "# dataset = " + opt.dataset + "\n# alpha = " +
                            std::to_string(opt.alpha) + "\n# topics = " +
                            std::to_string(opt.topics) + "\n# epsilon = " +
                            std::to_string(opt.epsilon) + "\n";
  {
    auto out = open_out(out_prefix + ".csv");
    out << extra;
    rflab::write_report_csv(report, out);
  }
  {
    auto out = open_out(out_prefix + ".txt");
    out << extra;
    rflab::write_report_table(report, out);
  }
  {
    auto out = open_out(out_prefix + "_pairwise.csv");
    out << extra;
    rflab::write_pairwise_csv(report, out);
  }
  std::cout << "wrote " << out_prefix << ".csv, " << out_prefix << ".txt, " << out_prefix
            << "_pairwise.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relevance feedback laboratory"};
  app.require_subcommand(1);

  CommonOptions common;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a clustered synthetic dataset");
  int categories = 40;
  int per_category = 50;
  std::string dims_csv = "8,8,8,8";
  double separation = 2.0;
  double noise = 1.0;
  std::string out_path;
  uint64_t synth_seed = 0;
  synth->add_option("--categories", categories, "number of categories");
  synth->add_option("--per-category", per_category, "items per category");
  synth->add_option("--dims", dims_csv, "word-space dims, e.g. 8,8,8,8");
  synth->add_option("--separation", separation, "category center spread");
  synth->add_option("--noise", noise, "within-category standard deviation");
  synth->add_option("--seed", synth_seed, "generator seed")->required();
  synth->add_option("--out", out_path, "output dataset path")->required();

  // xi-table
  auto* xi = app.add_subcommand("xi-table", "dump the geodesic arclength table");
  double xi_alpha = 0.5;
  double x_min = 0.0;
  double x_max = 8.0;
  double x_step = 0.05;
  std::string xi_out;
  xi->add_option("--alpha", xi_alpha, "deformation strength in (0,1)")->required();
  xi->add_option("--x-min", x_min, "range start");
  xi->add_option("--x-max", x_max, "range end");
  xi->add_option("--step", x_step, "sample step");
  xi->add_option("--out", xi_out, "output path")->required();

  // score
  auto* score = app.add_subcommand("score", "one-shot fit and rank of a single method");
  std::string score_method = "mars";
  std::string feedback_path;
  int score_q = 20;
  std::string score_out;
  score->add_option("--dataset", common.dataset, "dataset path")->required();
  score->add_option("--schema", common.schema, "schema sidecar (default <dataset>.schema)");
  score->add_option("--method", score_method, "method name");
  score->add_option("--feedback", feedback_path, "feedback file (id [weight] per line)")
      ->required();
  score->add_option("--q", score_q, "result list size");
  score->add_option("--alpha", common.alpha, "riemann/latent deformation");
  score->add_option("--topics", common.topics, "latent topic count");
  score->add_option("--epsilon", common.epsilon, "log-transform offset");
  score->add_option("--seed", common.seed, "seed for stochastic scorers");
  score->add_option("--out", score_out, "output path")->required();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "oracle-driven evaluation grid");
  std::string methods_csv;
  std::string kbar_csv;
  std::string r_csv;
  int bench_q = 20;
  int reps = 20;
  bool exclude_feedback = false;
  std::string bench_out;
  bench->add_option("--dataset", common.dataset, "dataset path")->required();
  bench->add_option("--schema", common.schema, "schema sidecar (default <dataset>.schema)");
  bench->add_option("--methods", methods_csv, "comma list (default: the six-scheme grid)");
  bench->add_option("--kbar", kbar_csv, "target random-hit means, comma list");
  bench->add_option("--r", r_csv, "feedback sizes, comma list");
  bench->add_option("--q", bench_q, "result list size");
  bench->add_option("--reps", reps, "repetitions per treatment");
  bench->add_option("--alpha", common.alpha, "riemann/latent deformation");
  bench->add_option("--topics", common.topics, "latent topic count");
  bench->add_option("--epsilon", common.epsilon, "log-transform offset");
  bench->add_option("--seed", common.seed, "master seed")->required();
  bench->add_flag("--exclude-feedback", exclude_feedback,
                  "drop feedback items from the scored universe");
  bench->add_option("--out", bench_out, "output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(categories, per_category, dims_csv, separation, noise, synth_seed,
                       out_path);
    }
    if (xi->parsed()) return cmd_xi_table(xi_alpha, x_min, x_max, x_step, xi_out);
    if (score->parsed()) {
      return cmd_score(common, score_method, feedback_path, score_q, score_out);
    }
    if (bench->parsed()) {
      return cmd_benchmark(common, methods_csv, kbar_csv, r_csv, bench_q, reps,
                           exclude_feedback, bench_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rflab::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const rflab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
