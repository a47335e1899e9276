// Loads a scenario config, optimizes it, and prints the run report.
//   quickstart [config]   (default: the bundled 20-node scenario)

#include <iostream>

#include "railelec/railelec.hpp"

#ifndef RAILELEC_SAMPLE_CONFIG
#define RAILELEC_SAMPLE_CONFIG "scenario.cfg"
#endif

int main(int argc, char** argv) {
  using namespace railelec;
  try {
    auto scenario = load_scenario(argc > 1 ? argv[1] : RAILELEC_SAMPLE_CONFIG);
    scenario.ga.generations = 20;
    const auto study = Study::load(scenario);
    std::cout << study->network().nodes().size() << " nodes, " << study->network().links().size() << " links, "
              << study->catalog().size() << " candidate corridors\n";
    const auto run = optimize(*study);
    std::cout << format_report(run.report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
