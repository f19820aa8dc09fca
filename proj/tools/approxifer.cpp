#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "approxifer/harness/commands.hpp"
#include "approxifer/harness/dataset.hpp"
#include "approxifer/harness/experiment.hpp"
#include "approxifer/harness/metrics.hpp"
#include "approxifer/net/dispatcher.hpp"
#include "approxifer/predictor.hpp"
#include "approxifer/weights_file.hpp"
#include "cli_common.hpp"

using namespace approxifer;

namespace {

struct IoArgs {
  std::string in;
  std::string out = "-";
};

void add_io(CLI::App* cmd, IoArgs& args) {
  cmd->add_option("--in", args.in, "input JSON ('-' for stdin)")->required();
  cmd->add_option("--out", args.out, "output JSON ('-' for stdout)");
}

struct SimulateArgs {
  std::size_t k = 8, s = 1, e = 0;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  std::size_t rounds = 1;
  std::string dataset = "fixture_blobs";
  std::string weights;
  std::string out = "-";
};

std::unique_ptr<Predictor> load_predictor(const std::string& weights, const std::string& dataset) {
  const std::string path = weights.empty() ? harness::fixture_weights(dataset).string() : weights;
  return mlp_predictor(load_weights(path));
}

int run_simulate(const SimulateArgs& a) {
  harness::ExperimentConfig config;
  config.name = "simulate";
  config.dataset = a.dataset;
  config.k = {a.k};
  config.s = {a.s};
  config.e = {a.e};
  config.sigma = {a.sigma};
  config.seeds = {a.seed};
  config.rounds = a.rounds;
  config.validate();
  const auto data = harness::load_named_dataset(a.dataset);
  const auto predictor = load_predictor(a.weights, a.dataset);
  const auto rows = harness::run_experiment(config, *predictor, data);
  if (a.out == "-") {
    harness::write_metrics_csv(std::cout, rows);
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    harness::write_metrics_csv(out, rows);
  }
  for (const auto& r : rows) {
    if (r.failed) std::cerr << "round " << r.round << " failed: " << r.error << '\n';
  }
  return 0;
}

struct DispatchArgs {
  std::string workers;
  std::size_t k = 0, s = 0, e = 0;
  int deadline_ms = 1000;
  std::string queries;
  std::string out = "-";
  std::uint64_t round = 0;
};

QueryBatch load_queries(const std::string& path, std::size_t k) {
  if (path.ends_with(".json")) {
    const auto doc = harness::read_json_file(path);
    return RowBlock::from_rows(doc.at("queries").get<std::vector<std::vector<double>>>());
  }
  const auto data = harness::load_csv_dataset(path);
  if (data.size() < k) throw std::invalid_argument(path + " has fewer than K rows");
  RowBlock batch(k, data.dim());
  for (std::size_t j = 0; j < k; ++j) {
    auto src = data.features.row(j);
    std::copy(src.begin(), src.end(), batch.row(j).begin());
  }
  return batch;
}

int run_dispatch(const DispatchArgs& a) {
  const CodingConfig config = make_config(a.k, a.s, a.e);
  const auto endpoints = net::parse_endpoint_list(a.workers);
  const QueryBatch batch = load_queries(a.queries, a.k);
  const auto result = net::dispatch(batch, config, endpoints, net::default_policy(config, a.deadline_ms), a.round);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (a.out != "-") {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot write " + a.out);
    out = &file;
  }
  *out << "query,argmax";
  for (std::size_t c = 0; c < result.decoded.front().size(); ++c) *out << ",p" << c;
  *out << '\n';
  out->precision(17);
  for (std::size_t j = 0; j < result.decoded.size(); ++j) {
    *out << j << ',' << argmax(result.decoded[j]);
    for (double v : result.decoded[j]) *out << ',' << v;
    *out << '\n';
  }
  std::cerr << "responses:";
  for (std::size_t w : result.round.returned) std::cerr << ' ' << w;
  std::cerr << "\nexcluded:";
  for (std::size_t w : result.round.excluded) std::cerr << ' ' << w;
  std::cerr << "\nround_latency_ms: " << result.round.wall_clock_ms << '\n';
  return 0;
}

int run_experiment_cmd(const std::string& path) {
  const auto config = harness::load_experiment_config(path);
  const auto data = harness::load_named_dataset(config.dataset);
  const std::string weights = config.weights.empty() ? harness::fixture_weights(config.dataset).string() : config.weights;
  const auto predictor = mlp_predictor(load_weights(weights));
  const auto rows = harness::run_experiment(config, *predictor, data);
  const auto files = harness::write_experiment_outputs(config, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failed ? 1 : 0;
  harness::write_summary_csv(std::cout, harness::summarize(rows));
  std::cerr << rows.size() << " rounds, " << failed << " failed\nmetrics: " << files.metrics
            << "\nsummary: " << files.summary << "\nplot: " << files.plot << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded prediction serving: codec utilities, simulator, worker and dispatcher"};
  app.require_subcommand(1);

  IoArgs encode_io, decode_io, locate_io;
  auto* encode = app.add_subcommand("encode", "encode a query batch");
  add_io(encode, encode_io);
  auto* decode = app.add_subcommand("decode", "decode returned coded predictions");
  add_io(decode, decode_io);
  auto* locate = app.add_subcommand("locate", "locate Byzantine workers in returned coded predictions");
  add_io(locate, locate_io);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run simulated rounds and print MetricsRow CSV");
  simulate->add_option("--k", sim_args.k)->required();
  simulate->add_option("--s", sim_args.s);
  simulate->add_option("--e", sim_args.e);
  simulate->add_option("--sigma", sim_args.sigma);
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--rounds", sim_args.rounds);
  simulate->add_option("--dataset", sim_args.dataset, "fixture_blobs, fixture_digits or external_csv:<path>");
  simulate->add_option("--weights", sim_args.weights);
  simulate->add_option("--out", sim_args.out);

  cli::ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "run a prediction worker");
  cli::add_serve_options(*serve, serve_args);

  DispatchArgs dispatch_args;
  auto* dispatch = app.add_subcommand("dispatch", "run one coded round against live workers");
  dispatch->add_option("--workers", dispatch_args.workers, "comma-separated host:port list, N+1 entries")->required();
  dispatch->add_option("--k", dispatch_args.k)->required();
  dispatch->add_option("--s", dispatch_args.s);
  dispatch->add_option("--e", dispatch_args.e);
  dispatch->add_option("--deadline-ms", dispatch_args.deadline_ms)->check(CLI::PositiveNumber);
  dispatch->add_option("--queries", dispatch_args.queries, "CSV (label,x...) or JSON {\"queries\": [...]}")
      ->required()
      ->check(CLI::ExistingFile);
  dispatch->add_option("--out", dispatch_args.out, "decoded predictions CSV");
  dispatch->add_option("--round", dispatch_args.round, "round id used in request ids");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a sweep from a config file");
  experiment->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode) harness::write_json_file(encode_io.out, harness::encode_command(harness::read_json_file(encode_io.in)));
    if (*decode) harness::write_json_file(decode_io.out, harness::decode_command(harness::read_json_file(decode_io.in)));
    if (*locate) harness::write_json_file(locate_io.out, harness::locate_command(harness::read_json_file(locate_io.in)));
    if (*simulate) return run_simulate(sim_args);
    if (*serve) return cli::run_serve(serve_args);
    if (*dispatch) return run_dispatch(dispatch_args);
    if (*experiment) return run_experiment_cmd(config_path);
  } catch (const net::QuorumNotReached& ex) {
    std::cerr << "error: " << ex.what() << "; responsive:";
    for (std::size_t w : ex.responsive()) std::cerr << ' ' << w;
    std::cerr << '\n';
    return 3;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
