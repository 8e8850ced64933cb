// Command line front end: run, validate, gen.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "spmtl/data.hpp"
#include "spmtl/experiment.hpp"

namespace {

// One line on stderr: {"error":"<category>","message":"..."}
int report_error(const std::string& category, const std::string& message, int code = 1) {
  nlohmann::ordered_json j;
  j["error"] = category;
  j["message"] = message;
  std::cerr << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << std::endl;
  return code;
}

std::string category_of(const std::exception& e) {
  if (dynamic_cast<const spmtl::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const spmtl::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const spmtl::SolverError*>(&e)) return "training";
  if (dynamic_cast<const spmtl::DimensionError*>(&e)) return "data";
  if (dynamic_cast<const spmtl::InvalidArgument*>(&e)) return "invalid";
  return "runtime";
}

int cmd_run(const std::string& path, std::optional<int> jobs, std::optional<std::uint64_t> seed,
            std::optional<std::string> out) {
  spmtl::RunConfig cfg = spmtl::load_run_config(path);
  if (jobs) cfg.jobs = *jobs;
  if (seed) cfg.seed = *seed;
  if (out) cfg.output_dir = *out;
  const spmtl::ExperimentResult result = spmtl::run_experiment(cfg);
  spmtl::write_results(result, cfg, cfg.output_dir);
  for (const auto& s : result.summaries) {
    std::cout << s.name << ' ' << spmtl::metric_name(result.metric) << ' '
              << spmtl::format_number(s.summary.mean) << " +- "
              << spmtl::format_number(s.summary.std_error);
    if (s.baseline) std::cout << " p_vs_" << *s.baseline << ' ' << spmtl::format_number(s.p_value);
    std::cout << '\n';
  }
  std::cout << "wrote " << cfg.output_dir.string() << '\n';
  return 0;
}

int cmd_validate(const std::string& path) {
  spmtl::RunConfig cfg;
  try {
    cfg = spmtl::load_run_config(path);
  } catch (const spmtl::ConfigError& e) {
    std::cout << "invalid: " << e.what() << '\n';
    return 1;
  }
  const auto findings = spmtl::validate_config(cfg);
  if (findings.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& f : findings) std::cout << "invalid: " << f << '\n';
  return 1;
}

int cmd_gen(const std::string& which, std::uint64_t seed, const std::string& out,
            std::optional<int> test_rows) {
  spmtl::SynConfig cfg = which == "syn1" ? spmtl::SynConfig::syn1(seed) : spmtl::SynConfig::syn2(seed);
  if (test_rows) cfg.n_test_per_task = *test_rows;
  const spmtl::SyntheticData data =
      which == "syn1" ? spmtl::generate_syn1(cfg) : spmtl::generate_syn2(cfg);
  spmtl::write_csv_dataset(data.data, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-paced multitask learning experiments"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<int> jobs;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", run_config, "Config file (JSON)")->required();
  run->add_option("--jobs", jobs, "Repeats run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_seed, "Root seed (overrides the config)");
  run->add_option("--out", run_out, "Output directory (overrides the config)");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validate_config, "Config file (JSON)")->required();

  std::string gen_which;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::optional<int> gen_test_rows;
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
  gen->add_option("generator", gen_which, "syn1 or syn2")
      ->required()
      ->check(CLI::IsMember({"syn1", "syn2"}));
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--test-rows", gen_test_rows, "Extra held-out rows per task (default 100)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (*run) return cmd_run(run_config, jobs, run_seed, run_out);
    if (*validate) return cmd_validate(validate_config);
    if (*gen) return cmd_gen(gen_which, gen_seed, gen_out, gen_test_rows);
  } catch (const std::exception& e) {
    return report_error(category_of(e), e.what());
  }
  return 0;
}
