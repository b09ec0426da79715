#pragma once

#include <filesystem>
#include <iosfwd>

#include "helab/field.hpp"

namespace helab {

// field/v1: one UTF-8 JSON header line
//   {"schema":"field/v1","N":..,"rank":..,"layout":"row-major x-fastest","dtype":"f64-le","count":..}
// followed by `count` little-endian doubles, component blocks back to back.

void write_field(std::ostream& out, const PeriodicField& field);
void write_field(const std::filesystem::path& path, const PeriodicField& field);
PeriodicField read_field(std::istream& in);
PeriodicField read_field(const std::filesystem::path& path);

}  // namespace helab
