// Command-line front end: dataset statistics, feature selection, the
// benchmark grid, and synthetic data generation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "llmfs/llmfs.hpp"

namespace {

llmfs::BackendKind backend_from_flag(const std::string& s) {
  if (s == "mock") return llmfs::BackendKind::mock;
  if (s == "http") return llmfs::BackendKind::http;
  llmfs::fail(llmfs::Errc::invalid_config, "backend must be http|mock");
}

llmfs::Averaging averaging_from_flag(const std::string& s) {
  if (s == "weighted") return llmfs::Averaging::weighted;
  if (s == "binary") return llmfs::Averaging::binary;
  llmfs::fail(llmfs::Errc::invalid_config, "averaging must be weighted|binary");
}

void write_descriptors_csv(const std::vector<llmfs::FeatureDescriptor>& descs,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) llmfs::fail(llmfs::Errc::io_error, "cannot write " + path);
  out << "feature,mean,std,median,min,max,iqr,malware_mean,benign_mean,"
         "malware_std,benign_std,mean_difference,samples_malware,"
         "samples_benign\n";
  auto join = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ';';
      s += llmfs::detail::format_g12(xs[i]);
    }
    return s;
  };
  using llmfs::detail::format_g12;
  for (const auto& d : descs) {
    out << d.name << ',' << format_g12(d.mu) << ',' << format_g12(d.sigma)
        << ',' << format_g12(d.median) << ',' << format_g12(d.min) << ','
        << format_g12(d.max) << ',' << format_g12(d.iqr) << ','
        << format_g12(d.mu_pos) << ',' << format_g12(d.mu_neg) << ','
        << format_g12(d.sigma_pos) << ',' << format_g12(d.sigma_neg) << ','
        << format_g12(d.delta_mu) << ',' << join(d.samples_pos) << ','
        << join(d.samples_neg) << '\n';
  }
}

int run_stats(const std::string& data, const std::string& label_column,
              std::uint64_t seed, const std::string& out_path) {
  llmfs::Dataset ds = llmfs::load_csv(data, label_column);
  auto descs = llmfs::describe_all(ds, 5, seed);
  write_descriptors_csv(descs, out_path);
  std::cout << "wrote " << descs.size() << " feature descriptors to "
            << out_path << "\n";
  return 0;
}

int run_select(const std::string& data, const std::string& label_column,
               const std::string& method, std::size_t k, std::uint64_t seed,
               const std::string& backend_flag, const std::string& out_path) {
  llmfs::Dataset ds = llmfs::load_csv(data, label_column);
  llmfs::SelectionResult sel;
  llmfs::ScoreVector scores;
  if (method == "sequential") {
    sel = llmfs::sequential_forward_select(ds, k, 32, seed);
    // No per-feature score exists for a wrapper method; publish the inverse
    // rank so the CSV stays sortable by the score column.
    scores.method_name = sel.method_name;
    scores.scores.assign(ds.d(), 0.0);
    for (std::size_t r = 0; r < sel.indices.size(); ++r)
      scores.scores[sel.indices[r]] = static_cast<double>(k - r);
  } else if (method == "llm") {
    llmfs::LlmConfig cfg;
    cfg.backend_kind = backend_from_flag(backend_flag);
    scores = llmfs::score_all_features(ds, cfg, llmfs::TaskContext{}, seed);
    sel = llmfs::top_k(scores, k);
  } else {
    scores = llmfs::compute_scores(method, ds, seed);
    sel = llmfs::top_k(scores, k);
  }
  llmfs::write_selection_csv(sel, scores, ds, out_path);
  std::cout << "selected " << sel.indices.size() << " of " << ds.d()
            << " features with " << method << "; wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-selection toolkit and benchmark harness"};
  app.require_subcommand(1);

  std::string data, label_column = "label", method = "variance";
  std::string out_path, config_path, backend_flag = "mock";
  std::string averaging_flag = "weighted";
  std::size_t k = 341;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_data) {
    auto* opt = cmd->add_option("--data", data, "input CSV path");
    if (needs_data) opt->required();
    cmd->add_option("--label-column", label_column,
                    "label column name (default: label)");
    cmd->add_option("--seed", seed, "master seed (default: 0)");
  };

  auto* stats = app.add_subcommand(
      "stats", "compute per-feature descriptor statistics");
  add_common(stats, true);
  stats->add_option("--out", out_path, "descriptor CSV output")->required();

  auto* select = app.add_subcommand(
      "select", "rank features and keep the top k");
  add_common(select, true);
  select->add_option("--method", method,
                     "scoring method (default: variance)");
  select->add_option("--k", k, "subset size (default: 341)");
  select->add_option("--backend", backend_flag,
                     "llm backend: http|mock (default: mock)");
  select->add_option("--out", out_path, "selection CSV output")->required();

  auto* bench = app.add_subcommand(
      "bench", "run the method x classifier benchmark grid");
  add_common(bench, false);
  bench->add_option("--config", config_path, "benchmark config file")
      ->required();
  bench->add_option("--backend", backend_flag,
                    "override llm backend: http|mock");
  bench->add_option("--averaging", averaging_flag,
                    "metric averaging: weighted|binary");
  bench->add_option("--out", out_path, "override output directory");

  std::size_t synth_n = 1000, synth_d = 50, synth_informative = 5;
  double synth_shift = 2.0;
  auto* synth = app.add_subcommand(
      "synth", "generate a labeled synthetic CSV dataset");
  synth->add_option("--n-samples", synth_n, "rows (default: 1000)");
  synth->add_option("--n-features", synth_d, "columns (default: 50)");
  synth->add_option("--n-informative", synth_informative,
                    "class-separated columns (default: 5)");
  synth->add_option("--mean-shift", synth_shift,
                    "class mean separation (default: 2.0)");
  synth->add_option("--seed", seed, "generator seed (default: 0)");
  synth->add_option("--out", out_path, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return run_stats(data, label_column, seed, out_path);
    if (select->parsed())
      return run_select(data, label_column, method, k, seed, backend_flag,
                        out_path);
    if (synth->parsed()) {
      llmfs::SynthSpec spec;
      spec.n_samples = synth_n;
      spec.n_features = synth_d;
      spec.n_informative = synth_informative;
      spec.mean_shift = synth_shift;
      spec.seed = seed;
      llmfs::write_csv(llmfs::generate_synthetic(spec), out_path);
      std::cout << "wrote " << spec.n_samples << "x" << spec.n_features
                << " synthetic dataset to " << out_path << "\n";
      return 0;
    }
    if (bench->parsed()) {
      llmfs::BenchConfig cfg = llmfs::parse_bench_config(config_path);
      if (!data.empty()) cfg.data_path = data;
      if (bench->count("--seed")) cfg.master_seed = seed;
      if (bench->count("--backend"))
        cfg.llm.backend_kind = backend_from_flag(backend_flag);
      if (bench->count("--averaging"))
        cfg.averaging = averaging_from_flag(averaging_flag);
      if (!out_path.empty()) cfg.output_dir = out_path;

      llmfs::BenchmarkReport report = llmfs::run_grid(cfg);
      const std::string dir = cfg.output_dir;
      std::filesystem::create_directories(dir);
      llmfs::emit_table(report, dir + "/report.csv");
      llmfs::emit_heatmap_matrix(report, dir + "/heatmap.csv");
      llmfs::write_run_log(report, dir + "/run_log.txt");

      std::size_t failed = 0;
      for (const auto& row : report.rows)
        if (!row.ok()) ++failed;
      std::cout << "grid complete: " << report.rows.size() << " cells, "
                << failed << " failed; outputs in " << dir << "\n";
      if (failed) {
        for (const auto& row : report.rows)
          if (!row.ok())
            std::cerr << "cell " << row.method << "," << row.classifier
                      << " failed: " << row.error << "\n";
      }
      return failed == 0 ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
