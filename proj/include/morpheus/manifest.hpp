#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "morpheus/error.hpp"
#include "morpheus/hash.hpp"

namespace morpheus {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance for one CLI run, written next to its outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t rng_seed = 0;
  std::string dataset_path;
  std::string dataset_sha256;
  std::string oracle;
  std::string started;
  std::string finished;
  std::size_t examples = 0;
  std::size_t failures = 0;
  std::size_t skipped = 0;
  std::size_t queries = 0;
  nlohmann::json extra = nlohmann::json::object();

  void set_dataset(const std::filesystem::path& path) {
    dataset_path = path.string();
    dataset_sha256 = sha256_file(path);
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"command", command},
                     {"config", config},
                     {"rng_seed", rng_seed},
                     {"dataset", {{"path", dataset_path}, {"sha256", dataset_sha256}}},
                     {"oracle", oracle},
                     {"started", started},
                     {"finished", finished},
                     {"counts",
                      {{"examples", examples},
                       {"failures", failures},
                       {"skipped", skipped},
                       {"queries", queries}}}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest " + path.string());
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace morpheus
