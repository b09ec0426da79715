#include "helab/field.hpp"

#include <cmath>
#include <string>

#include "helab/error.hpp"
#include "helab/fft.hpp"

namespace helab {

std::string_view rank_name(Rank rank) noexcept {
  switch (rank) {
    case Rank::scalar: return "scalar";
    case Rank::vector3: return "vector3";
    case Rank::tensor3x3: return "tensor3x3";
  }
  return "scalar";
}

Rank parse_rank(std::string_view name) {
  if (name == "scalar") return Rank::scalar;
  if (name == "vector3") return Rank::vector3;
  if (name == "tensor3x3") return Rank::tensor3x3;
  throw Error(ErrorCode::unsupported_rank, "unknown rank '" + std::string(name) + "'");
}

Spectrum::Spectrum(const Grid3& grid, Rank rank)
    : grid_(grid), rank_(rank), data_(grid.modes() * component_count(rank)) {}

PeriodicField::PeriodicField(const Grid3& grid, Rank rank)
    : grid_(grid), rank_(rank), values_(grid.points() * component_count(rank), 0.0), cache_(std::make_shared<Cache>()) {}

PeriodicField::PeriodicField(const Grid3& grid, Rank rank, std::vector<double> values)
    : grid_(grid), rank_(rank), values_(std::move(values)), cache_(std::make_shared<Cache>()) {
  if (values_.size() != grid_.points() * component_count(rank_)) {
    throw Error(ErrorCode::precondition, "sample count does not match grid and rank");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::precondition, "field samples must be finite");
  }
}

PeriodicField::PeriodicField(Spectrum spectrum)
    : grid_(spectrum.grid()),
      rank_(spectrum.rank()),
      values_(spectrum.grid().points() * spectrum.components()),
      cache_(std::make_shared<Cache>()) {
  const int n = grid_.n();
  for (int c = 0; c < spectrum.components(); ++c) {
    fft::inverse(n, spectrum.component(c).data(), values_.data() + static_cast<std::size_t>(c) * grid_.points());
  }
  std::call_once(cache_->once, [&] { cache_->spectrum.emplace(std::move(spectrum)); });
}

std::span<double> PeriodicField::mutable_values() {
  cache_ = std::make_shared<Cache>();
  return values_;
}

std::span<double> PeriodicField::mutable_component(int c) {
  cache_ = std::make_shared<Cache>();
  return {values_.data() + static_cast<std::size_t>(c) * grid_.points(), grid_.points()};
}

const Spectrum& PeriodicField::spectrum() const {
  std::call_once(cache_->once, [this] {
    Spectrum s(grid_, rank_);
    for (int c = 0; c < components(); ++c) {
      fft::forward(grid_.n(), component(c).data(), s.component(c).data());
    }
    cache_->spectrum.emplace(std::move(s));
  });
  return *cache_->spectrum;
}

bool PeriodicField::has_cached_spectrum() const noexcept { return cache_->spectrum.has_value(); }

void PeriodicField::check_compatible(const PeriodicField& other) const {
  if (!(grid_ == other.grid_)) throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
  if (rank_ != other.rank_) throw Error(ErrorCode::rank_mismatch, "fields have different ranks");
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  check_compatible(other);
  auto out = mutable_values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += other.values_[i];
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  check_compatible(other);
  auto out = mutable_values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= other.values_[i];
  return *this;
}

PeriodicField& PeriodicField::operator*=(double factor) {
  for (double& v : mutable_values()) v *= factor;
  return *this;
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double factor, PeriodicField a) { return a *= factor; }

std::vector<double> pointwise_magnitude(const PeriodicField& f) {
  const std::size_t points = f.grid().points();
  std::vector<double> out(points, 0.0);
  if (f.components() == 1) {
    const auto v = f.component(0);
    for (std::size_t i = 0; i < points; ++i) out[i] = std::abs(v[i]);
    return out;
  }
  for (int c = 0; c < f.components(); ++c) {
    const auto v = f.component(c);
    for (std::size_t i = 0; i < points; ++i) out[i] += v[i] * v[i];
  }
  for (double& v : out) v = std::sqrt(v);
  return out;
}

double integral(std::span<const double> samples, const Grid3& grid) {
  double sum = 0.0;
  for (double v : samples) sum += v;
  return sum * grid.cell_volume();
}

std::vector<double> component_means(const PeriodicField& f) {
  std::vector<double> means;
  const auto& s = f.spectrum();
  for (int c = 0; c < f.components(); ++c) means.push_back(s.component(c)[0].real());
  return means;
}

}  // namespace helab
