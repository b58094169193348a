#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cli {

struct GlobalOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;  // 0 = take the config's seed
  bool seed_set = false;
  int threads = 0;  // 0 = hardware concurrency
};

struct EpsOptions {
  std::filesystem::path material;
  double temperature_k = 294.15;
  int m_max = 500;
  double xi_min = 0.0, xi_max = 0.0;  // both > 0 selects a geometric grid
  int points = 200;
  std::string out_file = "eps_table.txt";
};

struct ConductivityOptions {
  std::filesystem::path input;
  std::string out_file = "conductivity_fit.txt";
};

int cmd_eps(const GlobalOptions& g, const EpsOptions& opt);
int cmd_force(const GlobalOptions& g);
int cmd_simulate(const GlobalOptions& g);
int cmd_calibrate(const GlobalOptions& g);
int cmd_extract(const GlobalOptions& g);
int cmd_conductivity_fit(const GlobalOptions& g, const ConductivityOptions& opt);

}  // namespace cli
