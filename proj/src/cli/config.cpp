#include "config.hpp"

#include <cstdio>
#include <sstream>

#include "smm/errors.hpp"

namespace smm::cli {

nlohmann::json to_json(const RunConfig& c) {
  return {{"command", c.command}, {"params", c.params}, {"output_dir", c.output_dir}, {"format", c.format},
          {"seed", c.seed}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.params = j.value("params", nlohmann::json::object());
    c.output_dir = j.value("output_dir", std::string("."));
    c.format = j.value("format", std::string("csv"));
    c.seed = j.value("seed", 0L);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed run config: ") + e.what());
  }
  if (c.format != "csv" && c.format != "json") throw InvalidArgument("format must be csv or json");
  return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  // nlohmann objects are key-sorted, so dump() is canonical
  const nlohmann::json key{{"command", c.command}, {"params", c.params}, {"format", c.format}, {"seed", c.seed}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key.dump())));
  return buf;
}

std::string output_name(const RunConfig& c, const std::string& suffix) {
  return c.command + "-" + config_hash(c) + suffix;
}

nlohmann::json csv_to_json(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  auto rows = nlohmann::json::array();
  if (!std::getline(is, line)) return rows;
  header = split(line);
  while (std::getline(is, line)) {
    const auto cells = split(line);
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t i = 0; i < cells.size() && i < header.size(); ++i) {
      std::size_t used = 0;
      try {
        const double v = std::stod(cells[i], &used);
        if (used == cells[i].size()) {
          row[header[i]] = v;
          continue;
        }
      } catch (const std::exception&) {
      }
      row[header[i]] = cells[i];
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

}  // namespace smm::cli
