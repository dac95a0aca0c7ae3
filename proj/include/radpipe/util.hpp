#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace radpipe {

// FNV-1a over a byte string; used for config hashes embedded in reports.
inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(uint64_t v);

// Chunked parallel map over [0, n). Falls back to the calling thread when
// only one hardware thread is available. Callers must make fn(i)
// independent per index (derive per-index seeds) so results do not depend
// on the schedule.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

// Minimal CSV helpers for the pipeline's manifests and feature tables.
// Fields never contain commas, quotes, or newlines.
std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& body);

std::string format_double(double v);  // shortest round-trip formatting

}  // namespace radpipe
