#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "helab/error.hpp"
#include "helab/harness.hpp"

namespace fs = std::filesystem;

namespace helab::harness {
namespace {

std::string relative_to(const fs::path& path, const fs::path& base) {
  const fs::path abs = fs::absolute(path).lexically_normal();
  const fs::path rel = abs.lexically_relative(fs::absolute(base).lexically_normal());
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs.generic_string();
}

nlohmann::json digest_list(const std::vector<fs::path>& paths, const fs::path& base) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : paths) list.push_back({{"path", relative_to(p, base)}, {"sha256", sha256_file(p)}});
  return list;
}

}  // namespace

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error(ErrorCode::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

nlohmann::json make_manifest(const ManifestEntry& entry, const fs::path& base) {
  return {{"schema", "manifest/v1"},
          {"subcommand", entry.subcommand},
          {"config", entry.config},
          {"inputs", digest_list(entry.inputs, base)},
          {"outputs", digest_list(entry.outputs, base)},
          {"wall_time_s", entry.wall_time_s},
          {"toolkit_version", toolkit_version}};
}

void write_manifest(const fs::path& path, const ManifestEntry& entry) {
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::current_path();
  write_atomic(path, make_manifest(entry, base).dump(2) + "\n");
}

void verify_manifest(const nlohmann::json& manifest, const fs::path& base) {
  if (!manifest.is_object() || manifest.value("schema", "") != "manifest/v1") {
    throw Error(ErrorCode::io, "not a manifest/v1 document in " + base.string());
  }
  for (const auto& entry : manifest.at("outputs")) {
    fs::path p = entry.at("path").get<std::string>();
    if (p.is_relative()) p = base / p;
    if (!fs::exists(p)) throw Error(ErrorCode::digest_mismatch, "manifest output missing: " + p.string());
    if (sha256_file(p) != entry.at("sha256").get<std::string>()) {
      throw Error(ErrorCode::digest_mismatch, "digest mismatch for " + p.string());
    }
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "inf" || text == "infinity") return INFINITY;
  if (text == "-inf") return -INFINITY;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (begin == end || ptr != end || ec == std::errc::invalid_argument) {
    throw Error(ErrorCode::config, "not a number: '" + text + "'");
  }
  if (ec == std::errc::result_out_of_range && std::abs(v) > 1.0) {
    throw Error(ErrorCode::config, "number out of range: '" + text + "'");
  }
  return v;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out.str();
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  CsvTable table;
  std::string text;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, text)) throw Error(ErrorCode::io, "empty CSV " + path.string());
  table.header = split(text);
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    auto row = split(text);
    if (row.size() != table.header.size()) throw Error(ErrorCode::io, "ragged CSV row in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace helab::harness
