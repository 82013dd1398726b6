// geophase: run config-driven experiments, list them, or run the acceptance suite.
//
// Exit status: 0 when every tolerance check passes, 1 when a check fails,
// 2 for usage and config errors, 3 when a computation raises.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geophase/acceptance.hpp"
#include "geophase/experiments.hpp"

namespace {

namespace ex = geophase::experiments;

struct Overrides {
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::size_t> steps;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

void apply(ex::ExperimentConfig& c, const Overrides& o) {
  if (o.output) c.output = *o.output;
  if (o.format) c.format = *o.format;
  if (o.steps) c.steps = *o.steps;
  if (o.tol) c.tol = *o.tol;
  if (o.seed) c.seed = *o.seed;
}

std::string render(const std::vector<ex::Report>& reports, const std::string& format, bool metadata) {
  if (format == "csv") {
    std::string out = ex::csv_header();
    for (const auto& r : reports) out += ex::to_csv_rows(r);
    return out;
  }
  auto one = [&](const ex::Report& r) {
    auto j = ex::to_json(r);
    if (metadata) j["metadata"] = {{"timestamp", ex::utc_timestamp()}, {"generator", "geophase"}};
    return j;
  };
  if (reports.size() == 1) return one(reports.front()).dump(2) + "\n";
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& r : reports) all.push_back(one(r));
  return all.dump(2) + "\n";
}

int run_command(const std::vector<std::string>& paths, const Overrides& o, bool parallel, bool metadata) {
  std::vector<ex::ExperimentConfig> configs;
  try {
    for (const auto& p : paths) {
      configs.push_back(ex::load_config(p));
      apply(configs.back(), o);
      ex::validate(configs.back());
    }
  } catch (const geophase::Error& e) {
    std::cerr << "geophase: " << e.what() << '\n';
    return 2;
  }
  // Several configs share one output target; the first config decides it unless overridden.
  const std::string format = configs.front().format;
  const std::string output = configs.front().output;

  std::vector<ex::Report> reports;
  try {
    reports = ex::run_all(configs, parallel);
  } catch (const geophase::Error& e) {
    std::cerr << "geophase: computation failed: " << e.what() << '\n';
    return 3;
  }

  const std::string text = render(reports, format, metadata);
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) {
      std::cerr << "geophase: cannot write '" << output << "'\n";
      return 2;
    }
    out << text;
  }

  bool ok = true;
  for (const auto& r : reports) {
    if (r.converged()) continue;
    ok = false;
    std::cerr << "geophase: tolerance failures in " << r.config.experiment << ":\n" << ex::deviation_table(r);
  }
  return ok ? 0 : 1;
}

int list_command() {
  for (const auto& e : ex::list_experiments())
    std::cout << e.name << "\t" << e.description << "\n\t[" << e.anchor << "]\n";
  return 0;
}

int check_command(const std::vector<int>& ids, const Overrides& o, bool verbose) {
  geophase::acceptance::Options opts;
  if (o.seed) opts.seed = *o.seed;
  if (o.steps) opts.steps = *o.steps;
  const std::set<int> only(ids.begin(), ids.end());
  const auto results = geophase::acceptance::run(opts, only);
  std::size_t passed = 0;
  for (const auto& r : results) {
    geophase::acceptance::print(std::cout, r, verbose);
    passed += r.passed() ? 1 : 0;
  }
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric phases of cyclic evolutions: experiments and acceptance checks"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::string output, format;
  std::size_t steps = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  app.add_option("--output,-o", output, "write the report here instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--steps", steps, "time steps per period")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "phase tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed for gauge sweeps");

  auto* run = app.add_subcommand("run", "run the experiments named by one or more config files");
  std::vector<std::string> configs;
  bool parallel = false, no_metadata = false;
  run->add_option("config", configs, "config file(s)")->required()->check(CLI::ExistingFile);
  run->add_flag("--parallel", parallel, "run independent configs concurrently; output order is unchanged");
  run->add_flag("--no-metadata", no_metadata, "omit the metadata block (timestamp) from JSON");

  app.add_subcommand("list", "list the available experiments");

  auto* check = app.add_subcommand("check", "run the acceptance suite");
  std::vector<int> ids;
  bool quiet = false;
  check->add_option("criteria", ids, "criterion numbers to run (default: all)")->check(CLI::Range(1, 10));
  check->add_flag("--quiet,-q", quiet, "print failing checks only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.count("--output")) o.output = output;
  if (app.count("--format")) o.format = format;
  if (app.count("--steps")) o.steps = steps;
  if (app.count("--tol")) o.tol = tol;
  if (app.count("--seed")) o.seed = seed;

  if (*run) return run_command(configs, o, parallel, !no_metadata);
  if (*check) return check_command(ids, o, !quiet);
  return list_command();
}
