#pragma once

#include <string>

#include "json.hpp"

namespace approxifer::harness {

// File-level utilities behind the encode/decode/locate subcommands. Each takes
// the parsed input document and returns the output document; malformed input
// throws std::invalid_argument.
//
// encode: {"K","S","E","queries": [[...], ...]}
//      -> {"K","S","E","N","alpha","beta","coded": [[...], ...]}
// decode: {"K","S","E","predictions": {"<worker>": [...]}, "excluded"?: [...]}
//      -> {"decoded": [[...], ...], "excluded": [...]}
// locate: {"K","S","E","predictions": {"<worker>": [...]}}
//      -> {"located": [...], "vote_counts": {...}, "inconsistent_classes": [...], "max_residual"}
nlohmann::json encode_command(const nlohmann::json& input);
nlohmann::json decode_command(const nlohmann::json& input);
nlohmann::json locate_command(const nlohmann::json& input);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace approxifer::harness
