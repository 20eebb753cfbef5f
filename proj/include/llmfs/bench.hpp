#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llmfs/dataset.hpp"
#include "llmfs/error.hpp"
#include "llmfs/eval.hpp"
#include "llmfs/format.hpp"
#include "llmfs/fs_classic.hpp"
#include "llmfs/llm.hpp"
#include "llmfs/models.hpp"
#include "llmfs/parallel.hpp"
#include "llmfs/rng.hpp"
#include "llmfs/selection.hpp"

namespace llmfs {

inline const std::vector<std::string>& all_fs_methods() {
  static const std::vector<std::string> names = {
      "variance", "chi2",       "anova",  "mi",
      "correlation", "tree",    "extratrees", "sequential",
      "random",   "llm",        "llm_prefilter"};
  return names;
}

// Methods that produce a per-feature score vector without a backend and can
// therefore also serve as the prefilter stage.
inline const std::vector<std::string>& score_based_methods() {
  static const std::vector<std::string> names = {
      "variance", "chi2", "anova", "mi", "correlation",
      "tree",     "extratrees", "random"};
  return names;
}

struct PrefilterSettings {
  std::string method = "variance";
  std::size_t m = 0;  // required (>= 1) when llm_prefilter is run
};

struct BenchConfig {
  std::string data_path;
  std::string label_column = "label";
  std::vector<std::string> methods = {
      "variance", "chi2",       "anova", "mi",   "correlation",
      "tree",     "extratrees", "sequential", "random", "llm"};
  std::vector<std::string> classifiers = {"knn", "random_forest",
                                          "extra_trees", "mlp"};
  std::size_t k = 341;
  double train_fraction = 0.8;
  std::uint64_t master_seed = 0;
  LlmConfig llm;
  TaskContext task;
  PrefilterSettings prefilter;
  std::string output_dir = ".";
  std::size_t workers = 1;
  Averaging averaging = Averaging::weighted;

  void validate() const {
    if (methods.empty())
      fail(Errc::invalid_config, "config lists no FS methods");
    if (classifiers.empty())
      fail(Errc::invalid_config, "config lists no classifiers");
    if (k == 0) fail(Errc::invalid_config, "k must be >= 1");
    if (workers == 0) fail(Errc::invalid_config, "workers must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      fail(Errc::invalid_config, "train_fraction must be in (0, 1)");
    const auto& known = all_fs_methods();
    for (const auto& m : methods)
      if (std::find(known.begin(), known.end(), m) == known.end())
        fail(Errc::invalid_config, "unknown FS method: " + m);
    for (const auto& c : classifiers) classifier_from_string(c);
    bool wants_prefilter =
        std::find(methods.begin(), methods.end(), "llm_prefilter") !=
        methods.end();
    if (wants_prefilter) {
      if (prefilter.m == 0)
        fail(Errc::invalid_config,
             "llm_prefilter requires prefilter.m >= 1");
      const auto& scorers = score_based_methods();
      if (std::find(scorers.begin(), scorers.end(), prefilter.method) ==
          scorers.end())
        fail(Errc::invalid_config,
             "prefilter.method must be a score-based method, got: " +
                 prefilter.method);
    }
    llm.validate();
  }
};

// Per-cell bookkeeping beyond the metric suite.
struct CellCounters {
  std::size_t chi2_shifted = 0;       // columns min-shifted before chi2
  std::size_t llm_fallbacks = 0;
  std::size_t llm_cache_hits = 0;
  std::size_t llm_backend_requests = 0;
};

struct BenchRow {
  std::string method;
  std::string classifier;
  std::size_t n_features = 0;
  EvalReport report;
  std::vector<std::size_t> selected;  // feature indices, ranked
  CellCounters counters;
  std::string error;  // non-empty marks a failed cell

  bool ok() const { return error.empty(); }
};

struct BenchmarkReport {
  std::vector<BenchRow> rows;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t k = 0;
  std::uint64_t master_seed = 0;
};

// Scores one train split with a score-based method. Exposed so the CLI and
// the prefilter stage use the exact seeding the grid uses.
inline ScoreVector compute_scores(const std::string& method,
                                  const Dataset& train, std::uint64_t seed,
                                  std::size_t* chi2_shifted = nullptr) {
  if (method == "variance") return variance_scores(train);
  if (method == "chi2") return chi2_scores(train, chi2_shifted);
  if (method == "anova") return anova_f_scores(train);
  if (method == "mi") return mutual_info_scores(train);
  if (method == "correlation") return correlation_filter_scores(train);
  if (method == "tree") return tree_importance_scores(train, 100, 12, seed);
  if (method == "extratrees")
    return extratrees_importance_scores(train, 100, 12, seed);
  if (method == "random") return random_scores(train, seed);
  fail(Errc::invalid_config, "not a score-based method: " + method);
}

namespace detail {

// Feature selection for one grid cell. The seed depends only on
// (master_seed, method), so every classifier paired with a method sees the
// same subset, while the per-cell timer still charges the work to the cell.
inline SelectionResult cell_selection(const std::string& method,
                                      const Dataset& train,
                                      const BenchConfig& cfg,
                                      Backend* backend_override,
                                      CellCounters& counters) {
  const std::uint64_t fs_seed = derive_seed(cfg.master_seed, "fs", method);
  if (method == "sequential")
    return sequential_forward_select(train, cfg.k, 32, fs_seed);
  if (method == "llm") {
    LlmScorer scorer(cfg.llm, cfg.task, backend_override);
    ScoreVector sv = scorer.score_all_features(train, fs_seed);
    auto st = scorer.stats();
    counters.llm_fallbacks = st.fallbacks;
    counters.llm_cache_hits = st.cache_hits;
    counters.llm_backend_requests = st.backend_requests;
    return top_k(sv, cfg.k);
  }
  if (method == "llm_prefilter") {
    ScoreVector pre = compute_scores(
        cfg.prefilter.method, train,
        derive_seed(cfg.master_seed, "fs", cfg.prefilter.method));
    LlmScorer scorer(cfg.llm, cfg.task, backend_override);
    ScoreVector sv =
        scorer.prefilter_rerank(train, pre, cfg.prefilter.m, fs_seed);
    auto st = scorer.stats();
    counters.llm_fallbacks = st.fallbacks;
    counters.llm_cache_hits = st.cache_hits;
    counters.llm_backend_requests = st.backend_requests;
    return top_k(sv, cfg.k);
  }
  return top_k(compute_scores(method, train, fs_seed, &counters.chi2_shifted),
               cfg.k);
}

inline ClassifierSpec spec_for(const std::string& classifier) {
  ClassifierSpec spec;
  spec.kind = classifier_from_string(classifier);
  return spec;
}

}  // namespace detail

// Runs the full method x classifier grid on a pre-loaded dataset. Each
// cell's runtime covers feature selection, training, and evaluation; cell
// failures are recorded in the row instead of aborting the run.
inline BenchmarkReport run_grid(const BenchConfig& cfg, const Dataset& ds,
                                Backend* backend_override = nullptr) {
  cfg.validate();
  auto [train, test] = split(ds, cfg.train_fraction, cfg.master_seed);

  BenchmarkReport report;
  report.n_train = train.n();
  report.n_test = test.n();
  report.k = cfg.k;
  report.master_seed = cfg.master_seed;
  report.rows.resize(cfg.methods.size() * cfg.classifiers.size());

  detail::parallel_for(
      report.rows.size(), cfg.workers, [&](std::size_t cell) {
        const std::string& method = cfg.methods[cell / cfg.classifiers.size()];
        const std::string& classifier =
            cfg.classifiers[cell % cfg.classifiers.size()];
        BenchRow& row = report.rows[cell];
        row.method = method;
        row.classifier = classifier;
        row.n_features = cfg.k;
        try {
          auto t0 = Clock::now();
          SelectionResult sel = detail::cell_selection(
              method, train, cfg, backend_override, row.counters);
          row.selected = sel.indices;
          Dataset train_p = project(train, sel);
          Dataset test_p = project(test, sel);
          TrainedModel model = TrainedModel::fit(
              train_p, detail::spec_for(classifier),
              derive_seed(cfg.master_seed, method, classifier));
          row.report = evaluate(model, test_p, t0, cfg.averaging);
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      });
  return report;
}

// Convenience overload that loads the dataset named in the config.
inline BenchmarkReport run_grid(const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.data_path.empty())
    fail(Errc::invalid_config, "config has no data_path");
  Dataset ds = load_csv(cfg.data_path, cfg.label_column);
  return run_grid(cfg, ds);
}

// Comparison table: one CSV row per grid cell, metrics at 3 decimals.
// Failed cells keep their identity columns and leave the metrics blank.
inline void emit_table(const BenchmarkReport& report,
                       const std::string& path) {
  if (report.rows.empty())
    fail(Errc::empty_input, "report has no rows");
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write table: " + path);
  out << "fs_method,classifier,n_features,accuracy,precision,recall,f1,auc,"
         "mcc,runtime_seconds\n";
  for (const auto& row : report.rows) {
    out << row.method << ',' << row.classifier << ',' << row.n_features
        << ',';
    if (row.ok()) {
      using detail::format_fixed3;
      out << format_fixed3(row.report.point.accuracy) << ','
          << format_fixed3(row.report.point.precision) << ','
          << format_fixed3(row.report.point.recall) << ','
          << format_fixed3(row.report.point.f1) << ','
          << (row.report.auc ? format_fixed3(*row.report.auc) : std::string())
          << ',' << format_fixed3(row.report.mcc) << ','
          << format_fixed3(row.report.runtime_seconds);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
  if (!out) fail(Errc::io_error, "failed writing table: " + path);
}

// Accuracy matrix, methods down the side and classifiers across the top.
// Orders follow first appearance in the report, so they match the config.
inline void emit_heatmap_matrix(const BenchmarkReport& report,
                                const std::string& path) {
  std::vector<std::string> methods, classifiers;
  std::map<std::pair<std::string, std::string>, const BenchRow*> cells;
  for (const auto& row : report.rows) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
      methods.push_back(row.method);
    if (std::find(classifiers.begin(), classifiers.end(), row.classifier) ==
        classifiers.end())
      classifiers.push_back(row.classifier);
    cells[{row.method, row.classifier}] = &row;
  }
  if (methods.empty() ||
      cells.size() != methods.size() * classifiers.size())
    fail(Errc::incomplete_grid,
         "heatmap needs every method x classifier cell exactly once");

  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write heatmap: " + path);
  out << "fs_method";
  for (const auto& c : classifiers) out << ',' << c;
  out << '\n';
  for (const auto& m : methods) {
    out << m;
    for (const auto& c : classifiers) {
      const BenchRow* row = cells.at({m, c});
      out << ',';
      if (row->ok()) out << detail::format_fixed3(row->report.point.accuracy);
    }
    out << '\n';
  }
  if (!out) fail(Errc::io_error, "failed writing heatmap: " + path);
}

// Plain-text run log: per-cell status, timing, and the counters that make
// timings interpretable (cache hits shrink LLM cells on reruns).
inline void write_run_log(const BenchmarkReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write run log: " + path);
  out << "n_train=" << report.n_train << " n_test=" << report.n_test
      << " k=" << report.k << " master_seed=" << report.master_seed << '\n';
  for (const auto& row : report.rows) {
    out << row.method << ',' << row.classifier;
    if (row.ok()) {
      out << " status=ok runtime_seconds="
          << detail::format_fixed3(row.report.runtime_seconds);
    } else {
      out << " status=error message=\"" << row.error << '"';
    }
    out << " chi2_shifted_columns=" << row.counters.chi2_shifted
        << " llm_fallbacks=" << row.counters.llm_fallbacks
        << " llm_cache_hits=" << row.counters.llm_cache_hits
        << " llm_backend_requests=" << row.counters.llm_backend_requests
        << '\n';
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    std::string item = trim(
        s.substr(start, comma == std::string::npos ? comma : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& key,
                               const std::string& value) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    fail(Errc::invalid_config, "bad integer for " + key + ": " + value);
  return static_cast<std::uint64_t>(v);
}

inline double parse_real(const std::string& key, const std::string& value) {
  double v;
  if (!parse_double(value, v))
    fail(Errc::invalid_config, "bad number for " + key + ": " + value);
  return v;
}

}  // namespace detail

// Flat `key = value` config with `#` comments and dotted keys for the
// nested LLM and prefilter settings. Unknown keys are rejected loudly.
inline BenchConfig parse_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open config: " + path);

  BenchConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::invalid_config, "config line " + std::to_string(line_no) +
                                     " is not `key = value`");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));

    if (key == "data_path") cfg.data_path = value;
    else if (key == "label_column") cfg.label_column = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "methods") cfg.methods = detail::split_list(value);
    else if (key == "classifiers") cfg.classifiers = detail::split_list(value);
    else if (key == "k") cfg.k = detail::parse_u64(key, value);
    else if (key == "train_fraction")
      cfg.train_fraction = detail::parse_real(key, value);
    else if (key == "master_seed") cfg.master_seed = detail::parse_u64(key, value);
    else if (key == "workers") cfg.workers = detail::parse_u64(key, value);
    else if (key == "averaging") {
      if (value == "weighted") cfg.averaging = Averaging::weighted;
      else if (value == "binary") cfg.averaging = Averaging::binary;
      else fail(Errc::invalid_config, "averaging must be weighted|binary");
    } else if (key == "task.text") {
      cfg.task.text = value;
    } else if (key == "llm.backend") {
      if (value == "mock") cfg.llm.backend_kind = BackendKind::mock;
      else if (value == "http") cfg.llm.backend_kind = BackendKind::http;
      else fail(Errc::invalid_config, "llm.backend must be http|mock");
    } else if (key == "llm.endpoint_url") cfg.llm.endpoint_url = value;
    else if (key == "llm.model_name") cfg.llm.model_name = value;
    else if (key == "llm.temperature")
      cfg.llm.temperature = detail::parse_real(key, value);
    else if (key == "llm.timeout_seconds")
      cfg.llm.timeout_seconds = detail::parse_real(key, value);
    else if (key == "llm.max_retries")
      cfg.llm.max_retries = detail::parse_u64(key, value);
    else if (key == "llm.max_parallel")
      cfg.llm.max_parallel = detail::parse_u64(key, value);
    else if (key == "llm.cache_path") cfg.llm.cache_path = value;
    else if (key == "prefilter.method") cfg.prefilter.method = value;
    else if (key == "prefilter.m")
      cfg.prefilter.m = detail::parse_u64(key, value);
    else
      fail(Errc::invalid_config, "unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

}  // namespace llmfs
