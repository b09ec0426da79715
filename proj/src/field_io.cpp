#include "helab/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "helab/error.hpp"

namespace helab {

static_assert(std::endian::native == std::endian::little, "field/v1 I/O assumes a little-endian host");

void write_field(std::ostream& out, const PeriodicField& field) {
  nlohmann::ordered_json header;
  header["schema"] = "field/v1";
  header["N"] = field.grid().n();
  header["rank"] = std::string(rank_name(field.rank()));
  header["layout"] = "row-major x-fastest";
  header["dtype"] = "f64-le";
  header["count"] = field.values().size();
  out << header.dump() << '\n';
  const auto values = field.values();
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw Error(ErrorCode::io, "failed to write field data");
}

void write_field(const std::filesystem::path& path, const PeriodicField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  write_field(out, field);
}

PeriodicField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::io, "field file: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, std::string("field file: malformed header: ") + e.what());
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!header.contains(key)) throw Error(ErrorCode::io, std::string("field file: header lacks '") + key + "'");
    return header.at(key);
  };
  if (require("schema") != "field/v1") throw Error(ErrorCode::io, "field file: unsupported schema");
  if (require("layout") != "row-major x-fastest") throw Error(ErrorCode::io, "field file: unsupported layout");
  if (require("dtype") != "f64-le") throw Error(ErrorCode::io, "field file: unsupported dtype");
  const Grid3 grid(require("N").get<int>());
  const Rank rank = parse_rank(require("rank").get<std::string>());
  const auto count = require("count").get<std::size_t>();
  if (count != grid.points() * component_count(rank)) {
    throw Error(ErrorCode::io, "field file: count does not match N and rank");
  }
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
    throw Error(ErrorCode::io, "field file: truncated data block");
  }
  return PeriodicField(grid, rank, std::move(values));
}

PeriodicField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open field file '" + path.string() + "'");
  return read_field(in);
}

}  // namespace helab
