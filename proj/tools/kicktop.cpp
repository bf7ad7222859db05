#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kicktop/error.hpp"
#include "kicktop/experiments.hpp"

extern char** environ;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::map<std::string, std::string> kicktop_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind("KICKTOP_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq != std::string::npos) env[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return env;
}

void print_list() {
  std::size_t width = 0;
  for (const auto& info : kicktop::list_experiments()) width = std::max(width, info.name.size());
  for (const auto& info : kicktop::list_experiments()) {
    std::cout << std::left << std::setw(static_cast<int>(width)) << info.name << "  -> "
              << info.reproduces << "  (" << info.summary << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kicked-top correlation experiments"};
  app.set_version_flag("--version", kicktop::version());
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  app.add_subcommand("list", "List experiments and what they reproduce");
  for (const auto& info : kicktop::list_experiments()) {
    CLI::App* sub = app.add_subcommand(info.name, info.summary);
    sub->add_option("--config", config_file, "key=value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override one setting, section.key=value");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "list") {
    print_list();
    return 0;
  }

  const auto kind = kicktop::experiment_from_string(chosen->get_name());
  try {
    kicktop::ExperimentConfig config = config_file.empty()
                                           ? kicktop::default_config(*kind)
                                           : kicktop::load_config(config_file, kind);
    kicktop::apply_environment(config, kicktop_environment());
    for (const std::string& o : overrides) kicktop::apply_override(config, o);
    if (out_dir) config.out = *out_dir;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;

    const kicktop::RunResult result = kicktop::run(config);
    for (const auto& file : result.files) std::cout << file.string() << '\n';
  } catch (const kicktop::ConfigError& e) {
    std::cerr << "kicktop: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const kicktop::DomainError& e) {
    std::cerr << "kicktop: invalid parameter: " << e.what() << '\n';
    return kConfigError;
  } catch (const kicktop::NumericalError& e) {
    std::cerr << "kicktop: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "kicktop: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
