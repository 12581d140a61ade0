#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdiv {

// Internal/runtime failures (shape mismatches, numeric errors, I/O).
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// User-facing configuration/usage problems; the CLI maps these to exit 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] void fail(const std::string& msg);

// Shortest round-trip decimal form (std::to_chars); CSV fields use this so
// parsing the file back reproduces the exact double.
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);
long long parse_int(const std::string& s, const std::string& context);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
std::string lower(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& content);

uint64_t fnv1a64(const void* data, std::size_t len, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t hash_doubles(std::span<const double> vals, uint64_t seed = 0xcbf29ce484222325ull);

void check_finite(std::span<const double> vals, const char* context);

double wall_seconds();

}  // namespace hdiv
