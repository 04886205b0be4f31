// Command-line driver: hypmass <subcommand> --config run.yaml [--out dir] [--workers k] [--seed s]

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hypmass/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mass of asymptotically hyperbolic manifolds with noncompact boundary"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  const std::pair<const char*, const char*> commands[] = {
      {"check-background", "background"}, {"check-decay", "decay"},    {"check-lemmas", "lemmas"},
      {"eval-mass", "mass"},              {"eval-hawking", "hawking"}, {"full", ""},
  };
  for (const auto& [name, suite] : commands) {
    auto* sub = app.add_subcommand(name, suite[0] ? std::string("run the ") + suite + " suite"
                                                  : std::string("run every suite listed in the config"));
    sub->add_option("--config", config_path, "run configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--workers", workers, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for random sample points (overrides config)");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = hypmass::load_config(config_path);
    if (out_dir) cfg.output = *out_dir;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    for (const auto& [name, suite] : commands)
      if (app.got_subcommand(name) && suite[0]) cfg.suites = {suite};

    const auto out = hypmass::run(cfg);
    hypmass::write_outputs(out, cfg.output);
    for (const auto& s : out.summary["suites"]) {
      std::cout << (s["passed"].get<bool>() ? "PASS " : "FAIL ") << s["name"].get<std::string>() << "\n";
      for (const auto& c : s["checks"])
        if (!c["passed"].get<bool>())
          std::cout << "  failed " << c["name"].get<std::string>() << ": observed " << c["observed"].dump()
                    << ", expected " << c["expected"].get<std::string>()
                    << (c.contains("note") ? " (" + c["note"].get<std::string>() + ")" : "") << "\n";
    }
    std::cout << "outputs written to " << cfg.output << "\n";
    return out.passed ? 0 : 1;
  } catch (const hypmass::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
