#include "approxifer/harness/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/error_locator.hpp"

namespace approxifer::harness {

using nlohmann::json;

namespace {

CodingConfig config_of(const json& in) {
  return make_config(in.at("K").get<std::size_t>(), in.value("S", std::size_t{0}), in.value("E", std::size_t{0}));
}

std::map<std::size_t, PredictionVector> predictions_of(const json& in, const CodingConfig& config) {
  std::map<std::size_t, PredictionVector> out;
  for (const auto& [key, value] : in.at("predictions").items()) {
    std::size_t worker = 0;
    try {
      std::size_t used = 0;
      worker = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw std::invalid_argument("predictions: worker key '" + key + "' is not an integer");
    }
    if (worker >= config.workers()) {
      throw std::invalid_argument("predictions: worker " + key + " outside 0.." + std::to_string(config.n));
    }
    out.emplace(worker, value.get<PredictionVector>());
  }
  return out;
}

void add_config(json& out, const CodingConfig& c) {
  out["K"] = c.k;
  out["S"] = c.s;
  out["E"] = c.e;
  out["N"] = c.n;
}

template <typename F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    throw std::invalid_argument(ex.what());
  }
}

}  // namespace

json encode_command(const json& input) {
  return guarded([&] {
    const CodingConfig config = config_of(input);
    const auto rows = input.at("queries").get<std::vector<std::vector<double>>>();
    const BerrutCodec codec(config);
    const CodedQuerySet coded = codec.encode(RowBlock::from_rows(rows));
    json out;
    add_config(out, config);
    out["alpha"] = codec.nodes().alpha;
    out["beta"] = codec.nodes().beta;
    json list = json::array();
    for (std::size_t i = 0; i < coded.rows(); ++i) list.push_back(coded.row_vector(i));
    out["coded"] = std::move(list);
    return out;
  });
}

json decode_command(const json& input) {
  return guarded([&] {
    const CodingConfig config = config_of(input);
    const auto returned = predictions_of(input, config);
    const auto excluded = input.value("excluded", std::set<std::size_t>{});
    const BerrutCodec codec(config);
    json out;
    out["decoded"] = codec.decode(returned, excluded);
    out["excluded"] = excluded;
    return out;
  });
}

json locate_command(const json& input) {
  return guarded([&] {
    const CodingConfig config = config_of(input);
    const auto returned = predictions_of(input, config);
    if (returned.empty()) throw std::invalid_argument("predictions: empty");
    const BerrutCodec codec(config);
    const std::size_t classes = returned.begin()->second.size();
    const auto report = locator::locate_errors_majority(returned, codec.nodes().beta, config.k, config.e, classes);
    json out;
    out["located"] = report.located;
    json counts = json::object();
    for (const auto& [w, c] : report.vote_counts) counts[std::to_string(w)] = c;
    out["vote_counts"] = std::move(counts);
    out["inconsistent_classes"] = report.inconsistent_classes;
    out["max_residual"] = report.max_residual;
    return out;
  });
}

json read_json_file(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    buf << in.rdbuf();
  }
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(path + ": " + ex.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(1) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(1) << '\n';
}

}  // namespace approxifer::harness
