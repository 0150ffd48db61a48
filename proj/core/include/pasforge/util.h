#ifndef PASFORGE_UTIL_H_
#define PASFORGE_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pasforge {

// Splits on runs of spaces and tabs.
std::vector<std::string_view> SplitFields(std::string_view line);
std::vector<std::string> Split(std::string_view text, char sep);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view Trim(std::string_view text);

// 64-bit FNV-1a. Used for artifact manifests and checkpoint compatibility.
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string HashHex(std::uint64_t hash);
std::string HashFileHex(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal text that parses back to the same value.
std::string FormatFloat(float value);
std::string FormatDouble(double value);

// Strict numeric parsing; throws std::invalid_argument on trailing garbage.
int ParseInt(std::string_view text);
float ParseFloat(std::string_view text);
double ParseDouble(std::string_view text);
bool ParseBool(std::string_view text);

// Reads PASFORGE_LOG (error | info | debug) and applies it to spdlog.
void ConfigureLoggingFromEnv();

}  // namespace pasforge

#endif  // PASFORGE_UTIL_H_
