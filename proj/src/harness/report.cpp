#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "helab/error.hpp"
#include "helab/harness.hpp"
#include "helab/norms.hpp"

namespace fs = std::filesystem;

namespace helab::harness {
namespace {

struct Point {
  double delta;
  double value;
  std::string quantity;
  std::string norm_kind;
};

struct Series {
  nlohmann::json config;
  std::map<double, Point> points;
};

nlohmann::json series_key(nlohmann::json config) {
  for (const char* k : {"out_dir", "delta_list", "first_cells", "last_cells", "config"}) config.erase(k);
  return config;
}

}  // namespace

ReportResult report(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.empty()) throw Error(ErrorCode::config, "report needs at least one run directory");
  std::vector<Series> series;
  for (const auto& dir : run_dirs) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw Error(ErrorCode::io, "no manifest.json in " + dir.string());
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::io, "malformed manifest in " + dir.string() + ": " + e.what());
    }
    verify_manifest(manifest, dir);
    if (manifest.at("subcommand") != "mollify-sweep") {
      throw Error(ErrorCode::config, dir.string() + " is not a mollify-sweep run");
    }
    const nlohmann::json key = series_key(manifest.at("config"));
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.config == key; });
    if (it == series.end()) {
      series.push_back({key, {}});
      it = std::prev(series.end());
    }
    const CsvTable table = read_csv(dir / "sweep.csv");
    if (table.header != std::vector<std::string>{"quantity", "delta", "norm_kind", "value"}) {
      throw Error(ErrorCode::io, "unexpected sweep.csv header in " + dir.string());
    }
    for (const auto& row : table.rows) {
      Point p{parse_number(row[1]), parse_number(row[3]), row[0], row[2]};
      auto [slot, inserted] = it->points.emplace(p.delta, p);
      if (!inserted) {
        const double a = slot->second.value;
        if (std::abs(a - p.value) > 1e-12 * std::max(std::abs(a), std::abs(p.value))) {
          throw Error(ErrorCode::conflict, "conflicting values at delta = " + format_number(p.delta) + ": " +
                                               format_number(a) + " vs " + format_number(p.value));
        }
      }
    }
  }

  ReportResult result;
  result.merged.header = {"series", "quantity", "delta", "norm_kind", "value"};
  result.summary = {{"schema", "report/v1"}, {"series", nlohmann::json::array()}};
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<double> x, y;
    for (const auto& [delta, p] : series[s].points) {
      result.merged.rows.push_back(
          {std::to_string(s), p.quantity, format_number(p.delta), p.norm_kind, format_number(p.value)});
      x.push_back(std::log(p.delta));
      y.push_back(std::log(p.value));
    }
    nlohmann::json entry = {{"series", s}, {"config", series[s].config}, {"points", x.size()}};
    if (x.size() >= 2) {
      const LineFit fit = fit_line(x, y);
      entry["slope"] = fit.slope;
      entry["intercept"] = fit.intercept;
      entry["residual"] = fit.residual;
    }
    result.summary["series"].push_back(entry);
  }
  return result;
}

}  // namespace helab::harness
