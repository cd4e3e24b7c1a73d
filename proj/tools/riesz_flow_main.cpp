#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "riesz/experiments.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (const std::string& a : args) {
    if (a == "--help" || a == "-h") {
      std::fputs(riesz::usage_text().c_str(), stdout);
      return 0;
    }
    if (a == "--version") {
      std::printf("%s\n", riesz::version_string());
      return 0;
    }
  }
  try {
    const riesz::ExperimentConfig cfg = riesz::parse_config(args);
    const riesz::SweepReport rep = riesz::run(cfg);
    if (rep.passed) {
      std::printf("%s: PASS\n", rep.experiment.c_str());
      return 0;
    }
    std::printf("%s: FAIL (%s)\n", rep.experiment.c_str(),
                rep.message.c_str());
    return 3;
  } catch (const riesz::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    std::fprintf(stderr, "run 'riesz-flow --help' for usage\n");
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
