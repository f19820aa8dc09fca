#pragma once

#include <string>

#include "CLI11.hpp"

namespace approxifer::cli {

struct ServeArgs {
  std::string listen;
  std::string weights;
  int delay_ms = 0;
  double noise_sigma = 0.0;
  unsigned long long noise_seed = 0;
};

void add_serve_options(CLI::App& app, ServeArgs& args);
int run_serve(const ServeArgs& args);

}  // namespace approxifer::cli
