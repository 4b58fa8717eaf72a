#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppaudit {

// Error taxonomy. The CLI maps ValidationError/ConfigError to exit code 2
// and TransportError to exit code 3.
struct AuditError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : AuditError {
    using AuditError::AuditError;
};

struct ConfigError : AuditError {
    using AuditError::AuditError;
};

struct TransportError : AuditError {
    TransportError(const std::string & what, int last_status)
        : AuditError(what), last_status(last_status) {}
    int last_status = 0;
};

struct IoError : AuditError {
    using AuditError::AuditError;
};

// 64-bit FNV-1a. Used for cache keys, template hashes and manifest digests.
uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ull);
std::string digest_hex(std::string_view bytes);
std::string digest_hex(uint64_t value);

// splitmix64 output for state `x`. Stable across platforms; used to derive
// per-iteration and per-work-item RNG seeds.
uint64_t splitmix64(uint64_t x);
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Maps a raw 64-bit draw onto [0, n) by 128-bit multiply. Unlike
// std::uniform_int_distribution the mapping is pinned by this library, so
// seeded sequences are reproducible across standard library implementations.
uint64_t bounded_index(uint64_t raw, uint64_t n);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// RFC-4180 field quoting.
std::string csv_escape(std::string_view field);
std::string csv_row(const std::vector<std::string> & fields);
// Fixed 4-decimal rendering used in all emitted tables.
std::string format_fixed4(double v);

std::string iso8601_utc_now();

double mean_of(const std::vector<double> & v);
// Spread over exactly the given values (divides by N, not N-1).
double stddev_of(const std::vector<double> & v);

std::string read_text_file(const std::string & path);
void write_text_file(const std::string & path, std::string_view content);

}  // namespace ppaudit
