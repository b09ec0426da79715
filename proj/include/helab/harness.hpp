#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace helab::harness {

inline constexpr const char* toolkit_version = "0.1.0";

/// Command-line entry point. Returns 0 on success, 1 on precondition or
/// configuration errors, 2 on numerical failure. Errors are reported as a
/// single JSON line on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

struct ManifestEntry {
  std::string subcommand;
  nlohmann::json config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double wall_time_s = 0.0;
};

/// manifest/v1 document with SHA-256 digests of every input and output.
/// Paths under base are stored relative to it.
nlohmann::json make_manifest(const ManifestEntry& entry, const std::filesystem::path& base);
/// Writes the manifest atomically; call after all outputs exist.
void write_manifest(const std::filesystem::path& path, const ManifestEntry& entry);
/// Recomputes output digests against disk; throws digest_mismatch. Paths in
/// the manifest are resolved relative to base.
void verify_manifest(const nlohmann::json& manifest, const std::filesystem::path& base);

/// %.17g, with "inf"/"-inf"/"nan" spelled out.
std::string format_number(double value);
/// Inverse of format_number.
double parse_number(const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string to_csv(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Merges mollify-sweep run directories into merged.csv and merged.json in
/// out_dir. Points are grouped into series by configuration; within a series
/// the delta grids are united and sorted. Duplicate points that differ by more
/// than 1e-12 relative raise a conflict error.
struct ReportResult {
  CsvTable merged;
  nlohmann::json summary;
};
ReportResult report(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace helab::harness
