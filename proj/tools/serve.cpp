#include <csignal>
#include <iostream>
#include <memory>

#include "approxifer/net/worker_server.hpp"
#include "approxifer/predictor.hpp"
#include "approxifer/weights_file.hpp"
#include "cli_common.hpp"

namespace approxifer::cli {

namespace {
net::WorkerServer* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->request_stop();
}
}  // namespace

void add_serve_options(CLI::App& app, ServeArgs& args) {
  app.add_option("--listen", args.listen, "host:port to listen on (port 0 picks one)")->required();
  app.add_option("--weights", args.weights, "WeightsFile JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--inject-delay-ms", args.delay_ms, "delay before every response")->check(CLI::NonNegativeNumber);
  app.add_option("--inject-noise-sigma", args.noise_sigma, "add N(0, sigma^2) noise to every response")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--inject-noise-seed", args.noise_seed, "seed for the injected noise");
}

int run_serve(const ServeArgs& args) {
  auto predictor = std::shared_ptr<const Predictor>(mlp_predictor(load_weights(args.weights)));
  net::FaultInjection faults;
  faults.delay_ms = args.delay_ms;
  faults.noise_sigma = args.noise_sigma;
  faults.noise_seed = args.noise_seed;
  net::WorkerServer server(net::parse_endpoint(args.listen), predictor, faults);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening " << server.endpoint().str() << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace approxifer::cli
