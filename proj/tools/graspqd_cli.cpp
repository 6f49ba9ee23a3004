// graspqd command line: run, compare, metrics, inspect.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error, 3 IO error.

#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "graspqd/experiment.hpp"
#include "json.hpp"

namespace {

using namespace graspqd;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

// Applies "--section.key=value" or "--section.key value" pairs in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) throw ConfigError("", "unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      set_config_value(config, body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= args.size()) throw ConfigError(body, "missing value");
      set_config_value(config, body, args[++i]);
    }
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            bool dry_run, bool quiet) {
  RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
  apply_overrides(config, overrides);
  config.validate();
  if (dry_run) {
    std::cout << serialize_config(config);
    return 0;
  }
  const fs::path dir = run_experiment(config, quiet ? nullptr : &std::cerr);
  std::cout << dir.string() << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& dirs, double step, const std::string& out) {
  std::vector<fs::path> paths(dirs.begin(), dirs.end());
  const ComparisonReport report = compare_runs(paths, step);
  std::cout << format_comparison(report);
  if (!out.empty()) write_comparison(report, out);
  return 0;
}

int cmd_metrics(const std::string& dir, int bins, double step, const std::string& out) {
  const LoadedRun run = load_run(dir);
  std::vector<const OutcomeArchive*> all;
  for (const auto& a : run.archives) all.push_back(&a);
  const ReferenceGraspSet ref = build_reference_set(all, step);
  std::cout << run.name << ": " << ref.size() << " distinct successful voxels over "
            << run.seeds.size() << " seed(s)\n";
  if (!out.empty()) fs::create_directories(out);
  for (std::size_t i = 0; i < run.seeds.size(); ++i) {
    const OutcomeArchive& a = run.archives[i];
    const std::string tag = "seed_" + std::to_string(run.seeds[i]);
    const auto successes = std::count_if(a.records.begin(), a.records.end(),
                                         [](const OutcomeRecord& r) { return r.fitness > 0.0; });
    std::cout << "  " << tag << ": evaluations " << a.total_evaluations << ", successes "
              << successes;
    if (ref.size() > 0) std::cout << ", coverage " << final_coverage(a, ref, step);
    const bool has_nu = std::any_of(a.records.begin(), a.records.end(),
                                    [](const OutcomeRecord& r) { return r.fitness > 0 && r.nu; });
    if (has_nu) std::cout << ", nu<=pi/4 " << nu_fraction_below(a, M_PI / 4);
    std::cout << "\n";
    if (out.empty()) continue;
    if (ref.size() > 0) {
      write_coverage_csv(fs::path(out) / (tag + "_coverage.csv"), coverage_curve(a, ref, step));
    }
    if (has_nu) write_histogram_csv(fs::path(out) / (tag + "_nu_histogram.csv"), nu_histogram(a, bins));
    write_voxels_json(fs::path(out) / (tag + "_voxels.json"), voxel_heatmap(a, step), step);
  }
  return 0;
}

int cmd_inspect(const std::string& target) {
  const fs::path path(target);
  if (fs::is_directory(path)) {
    const LoadedRun run = load_run(path);
    std::cout << "run " << run.name << " (" << to_string(run.config.prior) << ", "
              << to_string(run.config.algorithm) << ", gripper " << run.gripper << ")\n"
              << "mesh " << run.config.mesh << " scale " << run.config.mesh_scale << "\n";
    for (std::size_t i = 0; i < run.seeds.size(); ++i) {
      std::cout << "  seed " << run.seeds[i] << ": " << run.archives[i].records.size()
                << " outcome records, " << run.archives[i].total_evaluations << " evaluations\n";
    }
    return 0;
  }
  const std::string text = read_text_file(path);
  const std::string first = text.substr(0, text.find('\n'));
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(first);
  } catch (const nlohmann::json::exception&) {
    std::cout << first << "\n";
    return 0;
  }
  const std::string schema = head.value("schema", "");
  std::size_t count = 0;
  if (schema == kOutcomeSchema) {
    count = read_outcome_archive(path).records.size();
  } else if (schema == kEvalLogSchema) {
    count = read_eval_log(path).size();
  } else if (schema == kGridSchema) {
    count = read_behavior_grid(path).size();
  } else {
    std::cout << head.dump(2) << "\n";
    return 0;
  }
  std::cout << schema << " version " << head.value("version", -1) << ": " << count
            << " records\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality-diversity grasp generation"};
  app.set_version_flag("--version", graspqd::version());
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment; --section.key=value overrides config");
  run->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
  run->add_flag("--dry-run", dry_run, "Print the resolved config and exit");
  run->add_flag("-q,--quiet", quiet, "No progress output");
  run->allow_extras();

  std::vector<std::string> compare_dirs;
  double step = 0.01;
  std::string out;
  auto* compare = app.add_subcommand("compare", "Coverage of runs against their union");
  compare->add_option("runs", compare_dirs, "Run directories")->required()->expected(2, -1);
  compare->add_option("--step", step, "Quantization step (m)")->check(CLI::PositiveNumber);
  compare->add_option("-o,--out", out, "Directory for the table and curves");

  std::string metrics_dir;
  int bins = 36;
  auto* metrics = app.add_subcommand("metrics", "Per-seed metrics of one run");
  metrics->add_option("run", metrics_dir, "Run directory")->required();
  metrics->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
  metrics->add_option("--step", step, "Quantization step (m)")->check(CLI::PositiveNumber);
  metrics->add_option("-o,--out", out, "Directory for metric files");

  std::string inspect_target;
  auto* inspect = app.add_subcommand("inspect", "Summarize a run directory or artifact file");
  inspect->add_option("path", inspect_target, "Run directory or file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, run->remaining(), dry_run, quiet);
    if (*compare) return cmd_compare(compare_dirs, step, out);
    if (*metrics) return cmd_metrics(metrics_dir, bins, step, out);
    if (*inspect) return cmd_inspect(inspect_target);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
