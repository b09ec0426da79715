#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "helab/error.hpp"
#include "helab/field_forge.hpp"
#include "helab/field_io.hpp"
#include "helab/harness.hpp"

namespace fs = std::filesystem;
using namespace helab;
using namespace helab::harness;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("helab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("regime-check reports the boundary verdict exactly") {
  const auto r = cli({"regime-check", "--theta", "0.45", "--alpha", "0.10"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["conserves"] == true);
  CHECK(j["theta"] == "9/20");
  CHECK(j["time_exponent"]["exact"] == "1");
  CHECK(j["thresholds"]["remark2"]["exact"] == "90/43");
  CHECK(j["time_exponent_w3"].is_null());
}

TEST_CASE("synthesize then helicity recovers 3 (2pi)^3 for abc") {
  TempDir tmp;
  const auto s = cli({"synthesize", "--kind", "abc", "--N", "32", "-o", tmp / "abc.f1"});
  REQUIRE(s.code == 0);
  CHECK(fs::exists(tmp / "abc.f1.manifest.json"));
  const auto h = cli({"helicity", tmp / "abc.f1", "--delta_list", "0.8,1.2", "--pq_pairs", "2:2,1:inf",
                      "--out_dir", tmp / "hel"});
  REQUIRE(h.code == 0);
  const json j = read_json(tmp / "hel/helicity.json");
  const double volume = std::pow(2.0 * std::numbers::pi, 3);
  CHECK(j["schema"] == "helicity/v1");
  CHECK(j["H_direct"].get<double>() == doctest::Approx(3.0 * volume).epsilon(1e-12));
  CHECK(j["H_dual"].get<double>() == doctest::Approx(3.0 * volume).epsilon(1e-12));
  CHECK(j["E"].get<double>() == doctest::Approx(1.5 * volume).epsilon(1e-12));
  REQUIRE(j["per_delta"].size() == 2u);
  CHECK(j["per_delta"][0]["chain_rhs"].contains("2:2"));
  CHECK(j["per_delta"][0]["chain_rhs"].contains("1:inf"));
  const json m = read_json(tmp / "hel/manifest.json");
  CHECK(m["schema"] == "manifest/v1");
  CHECK(m["subcommand"] == "helicity");
  CHECK(m["inputs"][0]["sha256"] == sha256_file(tmp / "abc.f1"));
  CHECK_NOTHROW(verify_manifest(m, tmp.path / "hel"));
}

TEST_CASE("configuration errors exit 1 with one JSON line") {
  TempDir tmp;
  write_text(tmp / "empty.json", "");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"regime-check", "--config", tmp / "empty.json"},
           {"regime-check", "--theta", "0.5"},
           {"regime-check", "--theta", "0.5", "--alpha", "0.5", "--p", "3"},
           {"norms", "--bogus", "1"},
           {"synthesize", "--kind", "spiral", "-o", tmp / "x.f1"},
           {"helicity", tmp / "missing.f1"},
           {}}) {
    const auto r = cli(args);
    CHECK(r.code == 1);
    CHECK(r.err.find('\n') == r.err.size() - 1);
    const json e = json::parse(r.err);
    CHECK(e.contains("error"));
    CHECK(e.contains("message"));
  }
  write_text(tmp / "extra.json", R"({"theta": 0.5, "alpha": 0.5, "colour": "red"})");
  const auto r = cli({"regime-check", "--config", tmp / "extra.json"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "config");
}

TEST_CASE("config files are read and command-line values override them") {
  TempDir tmp;
  write_text(tmp / "c.json", R"({"theta": "1/3", "alpha": 0.2})");
  const json a = json::parse(cli({"regime-check", "--config", tmp / "c.json"}).out);
  CHECK(a["conserves"] == false);
  const json b = json::parse(cli({"regime-check", "--config", tmp / "c.json", "--alpha", "1/3"}).out);
  CHECK(b["conserves"] == true);
  CHECK(b["time_exponent"]["exact"] == "1");
}

TEST_CASE("numerical failures exit 2 and keep the last good state") {
  TempDir tmp;
  // |u|^2 stays finite while omega x u overflows.
  const Grid3 g(16);
  PeriodicField huge(g, Rank::vector3);
  auto v = huge.mutable_values();
  for (int k = 0; k < 16; ++k) {
    for (int j = 0; j < 16; ++j) {
      for (int i = 0; i < 16; ++i) {
        v[g.index(i, j, k)] = 6e153 * std::sin(5.0 * g.coordinate(k));
        v[2 * g.points() + g.index(i, j, k)] = 6e153 * std::sin(5.0 * g.coordinate(i));
      }
    }
  }
  write_field(tmp.path / "huge.f1", huge);
  const auto r = cli({"evolve", "--initial", "file", "--field", tmp / "huge.f1", "--dt", "1e-160", "--T", "1e-160",
                      "--out_dir", tmp / "e"});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "blow_up");
  CHECK(fs::exists(tmp.path / "e/last_good.f1"));
  const auto cfl = cli({"evolve", "--initial", "abc", "--N", "16", "--dt", "1", "--T", "1"});
  CHECK(cfl.code == 1);
  CHECK(json::parse(cfl.err)["error"] == "cfl_violation");
}

TEST_CASE("norms subcommand writes norms.json") {
  TempDir tmp;
  REQUIRE(cli({"synthesize", "--kind", "lacunary", "--N", "32", "--exponent", "0.4", "--octaves", "3", "--seed", "7",
               "-o", tmp / "f.f1"})
              .code == 0);
  const auto r = cli({"norms", tmp / "f.f1", "--kind", "holder", "--exponent", "0.4", "--out_dir", tmp / "n"});
  REQUIRE(r.code == 0);
  const json j = read_json(tmp / "n/norms.json");
  CHECK(j["kind"] == json::parse(r.out)["kind"]);
  CHECK(j["value"].get<double>() > 0.0);
  CHECK(j["N"] == 32);
  const auto fit = cli({"norms", tmp / "f.f1", "--kind", "exponent_fit"});
  REQUIRE(fit.code == 0);
  CHECK(json::parse(fit.out)["p"] == "inf");
}

TEST_CASE("mollify-sweep emits the rate CSV and summary") {
  TempDir tmp;
  REQUIRE(cli({"synthesize", "--kind", "lacunary", "--N", "128", "--exponent", "0.4", "--octaves", "5", "--seed", "7",
               "-o", tmp / "f.f1"})
              .code == 0);
  const auto r = cli({"mollify-sweep", tmp / "f.f1", "--quantity", "grad", "--first_cells", "4", "--last_cells", "32",
                      "--theoretical_exponent", "-0.6", "--out_dir", tmp / "s"});
  REQUIRE(r.code == 0);
  const CsvTable t = read_csv(tmp.path / "s/sweep.csv");
  CHECK(t.header == std::vector<std::string>{"quantity", "delta", "norm_kind", "value"});
  REQUIRE(t.rows.size() == 4u);
  CHECK(t.rows[0][0] == "grad");
  CHECK(t.rows[0][2] == "Linf");
  const json s = read_json(tmp / "s/summary.json");
  CHECK(s["theoretical_exponent"] == -0.6);
  // A refit from the CSV reproduces the reported slope.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& row : t.rows) {
    const double x = std::log(parse_number(row[1])), y = std::log(parse_number(row[3]));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(std::abs(slope - s["slope"].get<double>()) <= 1e-9);
}

TEST_CASE("evolve writes a trajectory CSV with a fixed column order") {
  TempDir tmp;
  const auto r = cli({"evolve", "--initial", "band", "--N", "32", "--seed", "2", "--kmax", "4", "--dt", "0.01", "--T",
                      "0.03", "--delta_list", "0.8", "--pq_pairs", "2:2", "--checkpoint", "--out_dir", tmp / "e"});
  REQUIRE(r.code == 0);
  const CsvTable t = read_csv(tmp.path / "e/trajectory.csv");
  CHECK(t.header == std::vector<std::string>{"t", "E", "H", "H_delta(0.8)", "flux(0.8)", "chain_rhs(0.8;2:2)"});
  CHECK(t.rows.size() == 4u);
  CHECK(parse_number(t.rows[3][0]) == doctest::Approx(0.03));
  CHECK(read_field(tmp.path / "e/final_state.f1").grid().n() == 32);
  const json summary = json::parse(r.out);
  CHECK(summary["steps"] == 3);
  CHECK(summary["E_drift"].get<double>() < 1e-8);
}

TEST_CASE("replaying a manifest config byte-reproduces the outputs") {
  TempDir tmp;
  const auto first = cli({"evolve", "--initial", "band", "--N", "16", "--seed", "5", "--dt", "0.01", "--T", "0.02",
                          "--out_dir", tmp / "a"});
  REQUIRE(first.code == 0);
  json config = read_json(tmp / "a/manifest.json")["config"];
  config["out_dir"] = tmp / "b";
  write_text(tmp / "replay.json", config.dump());
  REQUIRE(cli({"evolve", "--config", tmp / "replay.json"}).code == 0);
  CHECK(sha256_file(tmp / "a/trajectory.csv") == sha256_file(tmp / "b/trajectory.csv"));
}

TEST_CASE("manifest verification detects edited outputs") {
  TempDir tmp;
  REQUIRE(cli({"regime-check", "--theta", "1/3", "--alpha", "1/3", "--out_dir", tmp / "r"}).code == 0);
  const json m = read_json(tmp / "r/manifest.json");
  CHECK(m["outputs"][0]["path"] == "regime.json");
  CHECK(m["toolkit_version"] == toolkit_version);
  CHECK_NOTHROW(verify_manifest(m, tmp.path / "r"));
  write_text(tmp / "r/regime.json", "{}\n");
  try {
    verify_manifest(m, tmp.path / "r");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::digest_mismatch);
  }
  CHECK_THROWS_AS(verify_manifest(json::object(), tmp.path), Error);
}

TEST_CASE("report merges sweeps and guards against conflicts") {
  TempDir tmp;
  // Run directories in the mollify-sweep layout.
  auto sweep = [&](const std::string& dir, const std::vector<std::pair<double, double>>& points, double norm = 2.0) {
    fs::create_directories(tmp.path / dir);
    CsvTable t{{"quantity", "delta", "norm_kind", "value"}, {}};
    for (auto [d, v] : points) t.rows.push_back({"grad", format_number(d), "L2", format_number(v)});
    write_atomic(tmp.path / dir / "sweep.csv", to_csv(t));
    ManifestEntry e{"mollify-sweep", {{"field", "f.f1"}, {"quantity", "grad"}, {"norm", norm}, {"out_dir", dir}}, {},
                    {tmp.path / dir / "sweep.csv"}, 0.0};
    write_manifest(tmp.path / dir / "manifest.json", e);
  };
  auto power = [](double d) { return 3.0 * std::pow(d, -0.6); };
  sweep("a", {{0.2, power(0.2)}, {0.4, power(0.4)}});
  sweep("b", {{0.8, power(0.8)}, {0.4, power(0.4)}, {1.6, power(1.6)}});
  sweep("other", {{0.2, 1.0}, {0.4, 2.0}}, std::numeric_limits<double>::infinity());

  const ReportResult one = report({tmp.path / "a"});
  REQUIRE(one.merged.rows.size() == 2u);
  CHECK(one.merged.header == std::vector<std::string>{"series", "quantity", "delta", "norm_kind", "value"});
  CHECK(parse_number(one.merged.rows[0][2]) == 0.2);
  CHECK(parse_number(one.merged.rows[1][4]) == power(0.4));

  const auto merged = cli({"report", tmp / "b", tmp / "a", tmp / "other", "--out_dir", tmp / "m"});
  REQUIRE(merged.code == 0);
  const CsvTable t = read_csv(tmp.path / "m/merged.csv");
  REQUIRE(t.rows.size() == 6u);
  std::vector<double> deltas;
  for (const auto& row : t.rows) {
    if (row[0] == "0") deltas.push_back(parse_number(row[2]));
  }
  CHECK(deltas == std::vector<double>{0.2, 0.4, 0.8, 1.6});
  const json summary = read_json(tmp / "m/merged.json");
  CHECK(summary["schema"] == "report/v1");
  REQUIRE(summary["series"].size() == 2u);
  CHECK(summary["series"][0]["points"] == 4);
  CHECK(summary["series"][0]["slope"].get<double>() == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(summary["series"][1]["points"] == 2);

  // Same configuration, same radius, different value.
  sweep("c", {{0.4, power(0.4) * (1.0 + 1e-9)}, {3.2, power(3.2)}});
  try {
    report({tmp.path / "a", tmp.path / "c"});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
  const auto r = cli({"report", tmp / "a", tmp / "c"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "conflict");
  sweep("d", {{0.4, power(0.4) * (1.0 + 1e-14)}});
  CHECK_NOTHROW(report({tmp.path / "a", tmp.path / "d"}));

  // Edited outputs are caught before merging.
  write_text(tmp / "a/sweep.csv", "quantity,delta,norm_kind,value\n");
  const auto tampered = cli({"report", tmp / "a"});
  CHECK(tampered.code == 1);
  CHECK(json::parse(tampered.err)["error"] == "digest_mismatch");
}

TEST_CASE("numbers round trip through the 17-digit text form") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, std::numeric_limits<double>::denorm_min()}) {
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(std::isinf(parse_number("inf")));
  CHECK_THROWS_AS(parse_number("1.5x"), Error);
  CHECK_THROWS_AS(parse_number(""), Error);
}

TEST_CASE("csv round trip and atomic writes") {
  TempDir tmp;
  const CsvTable t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  write_atomic(tmp.path / "t.csv", to_csv(t));
  CHECK_FALSE(fs::exists(tmp.path / "t.csv.tmp"));
  const CsvTable back = read_csv(tmp.path / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  write_text(tmp / "ragged.csv", "a,b\n1\n");
  CHECK_THROWS_AS(read_csv(tmp.path / "ragged.csv"), Error);
  CHECK(sha256_file(tmp.path / "t.csv").size() == 64u);
  write_text(tmp / "abc.txt", "abc");
  CHECK(sha256_file(tmp.path / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
