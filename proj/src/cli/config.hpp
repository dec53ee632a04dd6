#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace smm::cli {

struct RunConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::string output_dir = ".";
  std::string format = "csv";  // or "json"
  long seed = 0;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

std::uint64_t fnv1a(const std::string& bytes);
/// Hash of the command, params, format and seed; the output directory does not enter.
std::string config_hash(const RunConfig& c);
/// <command>-<hash><suffix>, e.g. suffix ".csv" or ".symbol.csv".
std::string output_name(const RunConfig& c, const std::string& suffix);

/// CSV text to an array of row objects; numeric cells become numbers.
nlohmann::json csv_to_json(const std::string& csv);

std::string format_double(double x);

}  // namespace smm::cli
