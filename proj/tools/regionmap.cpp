#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "regionmap/acceptance.hpp"
#include "regionmap/harness.hpp"

namespace fs = std::filesystem;
using regionmap::ConfigError;
using regionmap::ExperimentConfig;

namespace {

struct CommonFlags {
  std::string config_file;
  std::string case_label;
  std::string algo;
  std::uint64_t budget = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::string methods;
  std::string out = "out";
  int jobs = 0;

  CLI::Option* case_opt = nullptr;
  CLI::Option* algo_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* repeats_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* methods_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_budget, bool with_algo) {
  app->add_option("--config", f.config_file, "JSON config file")->check(CLI::ExistingFile);
  f.case_opt = app->add_option("--case", f.case_label, "benchmark case: I, II or III");
  if (with_algo) f.algo_opt = app->add_option("--algo", f.algo, "hms or nea2");
  if (with_budget) f.budget_opt = app->add_option("--budget", f.budget, "global-phase evaluation budget");
  f.repeats_opt = app->add_option("--repeats", f.repeats, "seeded repeats");
  f.seed_opt = app->add_option("--seed", f.seed, "base seed");
  f.methods_opt = app->add_option("--methods", f.methods, "comma list of l2,h1,kriging (may be empty)");
  app->add_option("--out", f.out, "output directory");
  f.jobs_opt = app->add_option("--jobs", f.jobs, "parallel repeats (default $REGIONMAP_JOBS or 1)");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// defaults < config file < command line
ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (const char* env = std::getenv("REGIONMAP_JOBS")) {
    try {
      cfg.jobs = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError("REGIONMAP_JOBS must be an integer");
    }
  }
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
    cfg.apply(j);
  }
  nlohmann::json cli = nlohmann::json::object();
  if (f.case_opt && f.case_opt->count()) cli["case"] = f.case_label;
  if (f.algo_opt && f.algo_opt->count()) cli["algorithm"] = f.algo;
  if (f.budget_opt && f.budget_opt->count()) cli["budget"] = f.budget;
  if (f.repeats_opt->count()) cli["repeats"] = f.repeats;
  if (f.seed_opt->count()) cli["seed"] = f.seed;
  if (f.methods_opt->count()) cli["methods"] = split(f.methods);
  if (f.jobs_opt->count()) cli["jobs"] = f.jobs;
  cfg.apply(cli);
  cfg.validate();
  return cfg;
}

void print_summary(const regionmap::RunReport& report, std::ostream& os) {
  for (const auto& [name, s] : report.aggregate) {
    os << "  " << name << ": " << s.mean << " +- " << s.std << " (n=" << s.n << ")\n";
  }
  if (report.excluded > 0) os << "  excluded failed runs: " << report.excluded << "\n";
}

std::vector<std::uint64_t> parse_budgets(const std::string& spec) {
  std::uint64_t a = 0, b = 0, s = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s == 0 || a == 0 || b < a) {
    throw ConfigError("--budgets expects start:stop:step with 0 < start <= stop and step > 0");
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = a; v <= b; v += s) out.push_back(v);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regionmap: insensitivity-region discovery and approximation"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_flags, true, true);

  CommonFlags sweep_flags;
  std::string budgets;
  std::string algos = "hms,nea2";
  CLI::App* sweep = app.add_subcommand("sweep", "run a budget x algorithm grid of experiments");
  add_common(sweep, sweep_flags, false, false);
  sweep->add_option("--budgets", budgets, "start:stop:step")->required();
  sweep->add_option("--algo", algos, "comma list of algorithms");

  regionmap::acceptance::Options verify_opts;
  std::string only;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance checks and print a pass/fail table");
  verify->add_option("--criteria", only, "comma list of criterion numbers (default all)");
  CLI::Option* verify_jobs = verify->add_option("--jobs", verify_opts.jobs, "parallel repeats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = resolve(run_flags);
      const auto report = regionmap::run_experiment(cfg, fs::path(run_flags.out));
      std::cout << "case " << regionmap::case_label(cfg.benchmark_case) << ", "
                << regionmap::algorithm_name(cfg.algorithm) << ", budget " << cfg.budget << ", "
                << cfg.repeats << " run(s) -> " << run_flags.out << "\n";
      print_summary(report, std::cout);
      return 0;
    }
    if (*sweep) {
      ExperimentConfig base = resolve(sweep_flags);
      for (const std::string& algo : split(algos)) {
        for (std::uint64_t b : parse_budgets(budgets)) {
          ExperimentConfig cfg = base;
          cfg.algorithm = regionmap::parse_algorithm(algo);
          cfg.budget = b;
          cfg.validate();
          const fs::path dir = fs::path(sweep_flags.out) / (algo + "-" + std::to_string(b));
          const auto report = regionmap::run_experiment(cfg, dir);
          std::cout << algo << " budget " << b << " -> " << dir.string() << "\n";
          print_summary(report, std::cout);
        }
      }
      return 0;
    }
    if (*verify) {
      verify_opts.cli_path = fs::canonical("/proc/self/exe").string();
      if (!verify_jobs->count()) {
        if (const char* env = std::getenv("REGIONMAP_JOBS")) verify_opts.jobs = std::max(1, std::atoi(env));
      }
      for (const std::string& s : split(only)) {
        try {
          verify_opts.only.push_back(std::stoi(s));
        } catch (const std::exception&) {
          throw ConfigError("--criteria expects numbers");
        }
      }
      const auto results = regionmap::acceptance::run(verify_opts, true);
      int failed = 0;
      for (const auto& r : results) failed += r.pass ? 0 : 1;
      std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
