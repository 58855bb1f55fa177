// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "risim/config.hpp"

// Deterministic CSV output. Numbers are formatted with a fixed snprintf
// recipe so a run writes byte-identical files on every invocation, and a
// metadata sidecar records what produced them (config hash, seed, trial
// count; deliberately no timestamps or host details).

namespace risim {

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const SimConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_config(cfg))));
  return buf;
}

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> cells) { row(std::vector<std::string>(cells)); }

  bool good() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
};

// Sidecar written next to a CSV: same path with ".meta" appended.
inline void write_metadata(const std::string& csv_path, const SimConfig& cfg,
                           const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ofstream out(csv_path + ".meta", std::ios::binary);
  if (!out) throw std::runtime_error("write_metadata: cannot open " + csv_path + ".meta");
  out << "config_hash=" << config_hash(cfg) << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "trials=" << cfg.n_trials << '\n';
  out << "slots=" << cfg.n_slots << '\n';
  for (const auto& [key, value] : extra) out << key << '=' << value << '\n';
}

}  // namespace risim
