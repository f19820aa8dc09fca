#include <iostream>

#include "cli_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Prediction worker"};
  approxifer::cli::ServeArgs args;
  approxifer::cli::add_serve_options(app, args);
  CLI11_PARSE(app, argc, argv);
  try {
    return approxifer::cli::run_serve(args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
