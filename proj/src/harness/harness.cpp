#include "helab/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "helab/error.hpp"
#include "helab/euler.hpp"
#include "helab/field_forge.hpp"
#include "helab/field_io.hpp"
#include "helab/functionals.hpp"
#include "helab/mollifier.hpp"
#include "helab/norms.hpp"
#include "helab/regime.hpp"
#include "helab/spectral_ops.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace helab::harness {
namespace {

struct KeySpec {
  const char* name;
  bool flag;
  const char* help;
};

struct CommandSpec {
  const char* name;
  const char* help;
  const char* positional;  ///< key fed by positional arguments, or nullptr
  bool positional_many;
  std::vector<KeySpec> keys;
};

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> specs = {
      {"synthesize", "Generate a test field and write it in field/v1 format", nullptr, false,
       {{"kind", false, "abc | tg | lacunary | sobolev | band"},
        {"N", false, "grid points per axis (default 64)"},
        {"A", false, "ABC coefficient (default 1)"},
        {"B", false, "ABC coefficient (default 1)"},
        {"C", false, "ABC coefficient (default 1)"},
        {"exponent", false, "lacunary exponent theta"},
        {"alpha", false, "Sobolev exponent for kind=sobolev"},
        {"q_target", false, "recorded integrability target for kind=sobolev (default 2)"},
        {"octaves", false, "number of dyadic shells"},
        {"seed", false, "generator seed (default 0)"},
        {"rank", false, "scalar | vector (lacunary, band)"},
        {"divergence_free", true, "solenoidal lacunary/band field"},
        {"normalization", false, "lacunary amplitude scale (default 1)"},
        {"kmax", false, "band limit for kind=band (default 4)"},
        {"output", false, "output field path"}}},
      {"norms", "Evaluate one discrete (semi)norm of a field", "field", false,
       {{"field", false, "input field/v1 file"},
        {"kind", false, "holder | lp | gagliardo_local | gagliardo | besov | spectral_sobolev | exponent_fit"},
        {"exponent", false, "theta or alpha"},
        {"p", false, "integrability exponent (default 2; inf allowed)"},
        {"delta", false, "localization radius for gagliardo_local"},
        {"cutoff", false, "Holder pair cutoff (default pi)"},
        {"min_lag_cells", false, "Gagliardo small-lag exclusion in cells (default 2)"},
        {"max_shift", false, "Besov shift bound (default unbounded)"},
        {"out_dir", false, "directory for norms.json and manifest.json"}}},
      {"mollify-sweep", "Rate sweep of a mollified quantity over dyadic radii", "field", false,
       {{"field", false, "input field/v1 file (f)"},
        {"second", false, "second field for commutators (g)"},
        {"quantity", false, "grad | grad_curl | commutator_scalar | commutator_tensor"},
        {"norm", false, "Lp exponent of the measured quantity (default inf)"},
        {"delta_list", false, "comma-separated radii; overrides first_cells/last_cells"},
        {"first_cells", false, "smallest radius in cells (default 4)"},
        {"last_cells", false, "largest radius in cells (default N/8)"},
        {"theoretical_exponent", false, "reference slope echoed in the summary"},
        {"out_dir", false, "directory for sweep.csv, summary.json, manifest.json"}}},
      {"helicity", "Energy, helicity and mollified helicity diagnostics", "field", false,
       {{"field", false, "input field/v1 file"},
        {"delta_list", false, "comma-separated mollification radii"},
        {"pq_pairs", false, "comma-separated p:q pairs (default 2:2)"},
        {"out_dir", false, "directory for helicity.json and manifest.json"}}},
      {"regime-check", "Exact exponent arithmetic for the conservation regime", nullptr, false,
       {{"theta", false, "velocity exponent"},
        {"alpha", false, "vorticity exponent"},
        {"p", false, "default 2"},
        {"q", false, "default 2"},
        {"r", false, "default 2"},
        {"kappa", false, "default 2"},
        {"out_dir", false, "directory for regime.json and manifest.json"}}},
      {"evolve", "Galerkin-truncated Euler trajectory with helicity diagnostics", nullptr, false,
       {{"N", false, "grid points per axis (default 64)"},
        {"dt", false, "time step"},
        {"T", false, "final time"},
        {"seed", false, "seed for random initial data (default 0)"},
        {"initial", false, "abc | tg | lacunary | band | file"},
        {"field", false, "initial field for initial=file"},
        {"kmax", false, "band limit for initial=band (default 4)"},
        {"exponent", false, "lacunary exponent for initial=lacunary (default 0.5)"},
        {"octaves", false, "lacunary shells for initial=lacunary (default 3)"},
        {"delta_list", false, "comma-separated mollification radii"},
        {"pq_pairs", false, "comma-separated p:q pairs"},
        {"sample_every", false, "steps between samples (default 1)"},
        {"checkpoint", true, "write the final state as final_state.f1"},
        {"out_dir", false, "directory for trajectory.csv and manifest.json"}}},
      {"report", "Merge mollify-sweep run directories", "run_dirs", true,
       {{"run_dirs", false, "run directories"}, {"out_dir", false, "directory for merged.csv and merged.json"}}},
  };
  return specs;
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

/// Effective parameters: command-line values override the config file. Every
/// value read is echoed into `echo` for the manifest.
class Params {
 public:
  Params(const CommandSpec& spec, json config, std::map<std::string, std::string> cli)
      : config_(std::move(config)), cli_(std::move(cli)) {
    std::set<std::string> allowed;
    for (const auto& k : spec.keys) allowed.insert(k.name);
    for (const auto& [key, value] : config_.items()) {
      if (!allowed.count(key)) throw Error(ErrorCode::config, "unknown config key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return cli_.count(key) || (config_.contains(key) && !config_[key].is_null()); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    double v = 0.0;
    if (auto it = cli_.find(key); it != cli_.end()) {
      v = parse_number(it->second);
    } else if (config_.contains(key)) {
      const json& j = config_[key];
      if (j.is_number()) v = j.get<double>();
      else if (j.is_string()) v = parse_number(j.get<std::string>());
      else throw Error(ErrorCode::config, "key '" + key + "' must be a number");
    } else if (fallback) {
      v = *fallback;
    } else {
      throw Error(ErrorCode::config, "missing required key '" + key + "'");
    }
    echo[key] = number_json(v);
    return v;
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) {
    const double v = number(key, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw Error(ErrorCode::config, "key '" + key + "' must be an integer");
    echo[key] = static_cast<long>(v);
    return static_cast<long>(v);
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    std::string v;
    if (auto it = cli_.find(key); it != cli_.end()) {
      v = it->second;
    } else if (config_.contains(key)) {
      const json& j = config_[key];
      if (!j.is_string()) throw Error(ErrorCode::config, "key '" + key + "' must be a string");
      v = j.get<std::string>();
    } else if (fallback) {
      v = *fallback;
    } else {
      throw Error(ErrorCode::config, "missing required key '" + key + "'");
    }
    echo[key] = v;
    return v;
  }

  bool flag(const std::string& key) {
    bool v = false;
    if (cli_.count(key)) {
      v = true;
    } else if (config_.contains(key)) {
      if (!config_[key].is_boolean()) throw Error(ErrorCode::config, "key '" + key + "' must be a boolean");
      v = config_[key].get<bool>();
    }
    echo[key] = v;
    return v;
  }

  std::vector<std::string> items(const std::string& key) {
    std::vector<std::string> v;
    if (auto it = cli_.find(key); it != cli_.end()) {
      v = split_list(it->second);
    } else if (config_.contains(key)) {
      const json& j = config_[key];
      if (j.is_string()) {
        v = split_list(j.get<std::string>());
      } else if (j.is_array()) {
        for (const auto& e : j) {
          if (e.is_string()) v.push_back(e.get<std::string>());
          else if (e.is_number()) v.push_back(format_number(e.get<double>()));
          else throw Error(ErrorCode::config, "key '" + key + "' has a malformed entry");
        }
      } else {
        throw Error(ErrorCode::config, "key '" + key + "' must be a list");
      }
    }
    echo[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> v;
    for (const auto& s : items(key)) v.push_back(parse_number(s));
    json arr = json::array();
    for (double d : v) arr.push_back(number_json(d));
    echo[key] = arr;
    return v;
  }

  /// Exact reading: strings are parsed as decimals or fractions, JSON numbers
  /// through their shortest round-trip form.
  Exponent exact(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    std::optional<Exponent> v;
    if (auto it = cli_.find(key); it != cli_.end()) {
      v = parse_exponent(it->second);
    } else if (config_.contains(key)) {
      const json& j = config_[key];
      if (j.is_number()) v = exponent_from_double(j.get<double>());
      else if (j.is_string()) v = parse_exponent(j.get<std::string>());
      else throw Error(ErrorCode::config, "key '" + key + "' must be a number");
    } else if (fallback) {
      v = parse_exponent(*fallback);
    } else {
      throw Error(ErrorCode::config, "missing required key '" + key + "'");
    }
    echo[key] = v->str();
    return *v;
  }

  /// Exact rational reading with the same rules as exact().
  Rational ratio(const std::string& key) {
    Rational v;
    if (auto it = cli_.find(key); it != cli_.end()) {
      v = parse_rational(it->second);
    } else if (config_.contains(key)) {
      const json& j = config_[key];
      if (j.is_number()) v = rational_from_double(j.get<double>());
      else if (j.is_string()) v = parse_rational(j.get<std::string>());
      else throw Error(ErrorCode::config, "key '" + key + "' must be a number");
    } else {
      throw Error(ErrorCode::config, "missing required key '" + key + "'");
    }
    echo[key] = format_rational(v);
    return v;
  }

  json echo = json::object();

 private:
  json config_;
  std::map<std::string, std::string> cli_;
};

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw Error(ErrorCode::config, "empty config file " + path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, "malformed config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "config must be a JSON object");
  return j;
}

ConjugatePair parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::config, "pair '" + text + "' must be written p:q");
  ConjugatePair pair{parse_number(text.substr(0, colon)), parse_number(text.substr(colon + 1))};
  check_conjugate_pair(pair);
  return pair;
}

std::string pair_label(const ConjugatePair& pair) { return format_number(pair.p) + ":" + format_number(pair.q); }

std::string norm_label(double p) { return std::isinf(p) ? "Linf" : "L" + format_number(p); }

struct Outputs {
  std::optional<fs::path> dir;
  std::vector<fs::path> inputs;
  std::vector<fs::path> written;

  void open(Params& params) {
    if (params.has("out_dir")) {
      dir = params.text("out_dir");
      fs::create_directories(*dir);
    }
  }
  void text_file(const std::string& name, const std::string& contents) {
    const fs::path p = *dir / name;
    write_atomic(p, contents);
    written.push_back(p);
  }
  void field_file(const fs::path& p, const PeriodicField& f) {
    std::ostringstream buf;
    write_field(buf, f);
    write_atomic(p, buf.str());
    written.push_back(p);
  }
};

using Clock = std::chrono::steady_clock;

struct Context {
  std::string subcommand;
  Params& params;
  Outputs outputs;
  std::ostream& out;
  Clock::time_point start = Clock::now();

  void finish(const fs::path& manifest_path) {
    ManifestEntry entry{subcommand, params.echo, outputs.inputs, outputs.written,
                        std::chrono::duration<double>(Clock::now() - start).count()};
    write_manifest(manifest_path, entry);
  }
};

PeriodicField load_input(Context& ctx, const std::string& key) {
  const fs::path p = ctx.params.text(key);
  PeriodicField f = read_field(p);
  ctx.outputs.inputs.push_back(p);
  return f;
}

int cmd_synthesize(Context& ctx) {
  Params& P = ctx.params;
  const std::string kind = P.text("kind");
  const Grid3 grid(static_cast<int>(P.integer("N", 64)));
  const auto seed = static_cast<std::uint64_t>(P.integer("seed", 0));
  std::optional<PeriodicField> f;
  if (kind == "abc") {
    f = abc_flow(P.number("A", 1.0), P.number("B", 1.0), P.number("C", 1.0), grid);
  } else if (kind == "tg") {
    f = taylor_green(grid);
  } else if (kind == "lacunary") {
    LacunarySpec spec;
    spec.exponent = P.number("exponent");
    spec.octaves = static_cast<int>(P.integer("octaves"));
    spec.seed = seed;
    spec.rank = parse_rank(P.text("rank", "scalar"));
    spec.divergence_free = P.flag("divergence_free");
    spec.normalization = P.number("normalization", 1.0);
    f = lacunary_field(spec, grid);
  } else if (kind == "sobolev") {
    f = prescribed_sobolev_field(P.number("alpha"), P.number("q_target", 2.0), static_cast<int>(P.integer("octaves")),
                                 grid, seed);
  } else if (kind == "band") {
    f = random_band_limited(grid, seed, static_cast<int>(P.integer("kmax", 4)), parse_rank(P.text("rank", "vector")),
                            P.flag("divergence_free"));
  } else {
    throw Error(ErrorCode::config, "unknown field kind '" + kind + "'");
  }
  const fs::path path = P.text("output");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  ctx.outputs.field_file(path, *f);
  fs::path manifest = path;
  manifest += ".manifest.json";
  ctx.finish(manifest);
  ctx.out << json{{"output", path.string()}, {"N", grid.n()}, {"rank", rank_name(f->rank())}}.dump() << "\n";
  return 0;
}

json seminorm_json(const SeminormValue& v) {
  json j = {{"kind", seminorm_kind_name(v.kind)},
            {"exponent", v.exponent},
            {"p", number_json(v.p)},
            {"value", v.value},
            {"N", v.n}};
  j["delta"] = v.delta ? json(*v.delta) : json(nullptr);
  return j;
}

int cmd_norms(Context& ctx) {
  Params& P = ctx.params;
  const PeriodicField f = load_input(ctx, "field");
  const std::string kind = P.text("kind");
  ctx.outputs.open(P);
  json result;
  if (kind == "holder") {
    result = seminorm_json(holder_seminorm(f, P.number("exponent"), P.number("cutoff", std::numbers::pi)));
  } else if (kind == "lp") {
    result = seminorm_json(lp_seminorm(f, P.number("p", 2.0)));
  } else if (kind == "gagliardo_local") {
    result = seminorm_json(gagliardo_seminorm_local(f, P.number("exponent"), P.number("p", 2.0), P.number("delta"),
                                                    {P.number("min_lag_cells", 2.0)}));
  } else if (kind == "gagliardo") {
    result = seminorm_json(gagliardo_seminorm(f, P.number("exponent"), P.number("p", 2.0), {P.number("min_lag_cells", 2.0)}));
  } else if (kind == "besov") {
    result = seminorm_json(besov_seminorm(f, P.number("exponent"), P.number("p", 2.0), P.number("max_shift", infinity)));
  } else if (kind == "spectral_sobolev") {
    result = seminorm_json(spectral_sobolev_seminorm(f, P.number("exponent")));
  } else if (kind == "exponent_fit") {
    const double p = P.number("p", infinity);
    const ExponentFit fit = exponent_estimate(f, p);
    result = {{"kind", "exponent_fit"},        {"p", number_json(p)},       {"slope", fit.slope},
              {"intercept", fit.intercept},    {"residual", fit.residual}, {"lags", fit.lags},
              {"moduli", fit.moduli},          {"N", f.grid().n()}};
  } else {
    throw Error(ErrorCode::config, "unknown norm kind '" + kind + "'");
  }
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("norms.json", result.dump(2) + "\n");
    ctx.finish(*ctx.outputs.dir / "manifest.json");
  }
  ctx.out << result.dump() << "\n";
  return 0;
}

int cmd_mollify_sweep(Context& ctx) {
  Params& P = ctx.params;
  const PeriodicField f = load_input(ctx, "field");
  const SweepQuantity quantity = parse_sweep_quantity(P.text("quantity"));
  std::optional<PeriodicField> g;
  if (quantity == SweepQuantity::commutator_scalar || quantity == SweepQuantity::commutator_tensor) {
    g = P.has("second") ? load_input(ctx, "second") : f;
  }
  const double norm = P.number("norm", infinity);
  std::vector<double> deltas;
  if (P.has("delta_list")) {
    deltas = P.numbers("delta_list");
  } else {
    deltas = dyadic_deltas(f.grid(), static_cast<int>(P.integer("first_cells", 4)),
                           static_cast<int>(P.integer("last_cells", f.grid().n() / 8)));
  }
  std::optional<double> theory;
  if (P.has("theoretical_exponent")) theory = P.number("theoretical_exponent");
  ctx.outputs.open(P);

  const RateSweep sweep = rate_sweep(quantity, f, g ? &*g : nullptr, deltas, norm, theory);
  CsvTable table{{"quantity", "delta", "norm_kind", "value"}, {}};
  json points = json::array();
  for (const auto& pt : sweep.points) {
    table.rows.push_back({std::string(sweep_quantity_name(quantity)), format_number(pt.delta), norm_label(norm),
                          format_number(pt.value)});
    points.push_back({{"delta", pt.delta}, {"value", pt.value}});
  }
  json summary = {{"quantity", sweep_quantity_name(quantity)},
                  {"norm_kind", norm_label(norm)},
                  {"slope", sweep.slope},
                  {"intercept", sweep.intercept},
                  {"residual", sweep.residual},
                  {"points", points}};
  summary["theoretical_exponent"] = theory ? json(*theory) : json(nullptr);
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("sweep.csv", to_csv(table));
    ctx.outputs.text_file("summary.json", summary.dump(2) + "\n");
    ctx.finish(*ctx.outputs.dir / "manifest.json");
  }
  ctx.out << summary.dump() << "\n";
  return 0;
}

std::vector<ConjugatePair> read_pairs(Params& P, const char* fallback) {
  std::vector<ConjugatePair> pairs;
  std::vector<std::string> items = P.has("pq_pairs") ? P.items("pq_pairs") : split_list(fallback);
  for (const auto& s : items) pairs.push_back(parse_pair(s));
  json echo = json::array();
  for (const auto& pair : pairs) echo.push_back(pair_label(pair));
  P.echo["pq_pairs"] = echo;
  return pairs;
}

int cmd_helicity(Context& ctx) {
  Params& P = ctx.params;
  const PeriodicField u = load_input(ctx, "field");
  const std::vector<double> deltas = P.has("delta_list") ? P.numbers("delta_list") : std::vector<double>{};
  const std::vector<ConjugatePair> pairs = read_pairs(P, "2:2");
  ctx.outputs.open(P);
  const HelicityReport r = diagnose(u, deltas, pairs);
  json per_delta = json::array();
  for (const auto& d : r.per_delta) {
    json rhs = json::object();
    for (std::size_t i = 0; i < pairs.size(); ++i) rhs[pair_label(pairs[i])] = d.chain_rhs[i];
    per_delta.push_back({{"delta", d.delta}, {"H_delta", d.helicity}, {"flux", d.flux}, {"chain_rhs", rhs}});
  }
  json result = {{"schema", "helicity/v1"},
                 {"N", u.grid().n()},
                 {"H_direct", r.helicity_direct},
                 {"H_dual", r.helicity_dual},
                 {"E", r.energy},
                 {"mean_dropped", r.mean_dropped},
                 {"per_delta", per_delta}};
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("helicity.json", result.dump(2) + "\n");
    ctx.finish(*ctx.outputs.dir / "manifest.json");
  }
  ctx.out << result.dump() << "\n";
  return 0;
}

json rational_json(const Rational& r) { return {{"exact", format_rational(r)}, {"value", to_double(r)}}; }

int cmd_regime_check(Context& ctx) {
  Params& P = ctx.params;
  const Rational theta = P.ratio("theta");
  const Rational alpha = P.ratio("alpha");
  const ExponentRegime regime = ExponentRegime::make(theta, alpha, P.exact("p", "2"), P.exact("q", "2"),
                                                     P.exact("r", "2"), P.exact("kappa", "2"));
  ctx.outputs.open(P);
  const RegimeVerdict v = evaluate(regime);
  json result = {{"theta", format_rational(regime.theta)},
                 {"alpha", format_rational(regime.alpha)},
                 {"conserves", v.conserves},
                 {"time_exponent", rational_json(v.time_exponent)},
                 {"thresholds",
                  {{"embedding", rational_json(v.embedding_threshold)},
                   {"remark2", rational_json(v.remark2.q_threshold)},
                   {"remark2_companion_theta", rational_json(v.remark2.companion_theta)}}}};
  result["time_exponent_w3"] = v.time_exponent_w3 ? rational_json(*v.time_exponent_w3) : json(nullptr);
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("regime.json", result.dump(2) + "\n");
    ctx.finish(*ctx.outputs.dir / "manifest.json");
  }
  ctx.out << result.dump() << "\n";
  return 0;
}

int cmd_evolve(Context& ctx) {
  Params& P = ctx.params;
  const std::string initial = P.text("initial");
  std::optional<PeriodicField> u0;
  if (initial == "file") {
    u0 = load_input(ctx, "field");
  } else {
    const Grid3 grid(static_cast<int>(P.integer("N", 64)));
    const auto seed = static_cast<std::uint64_t>(P.integer("seed", 0));
    if (initial == "abc") {
      u0 = abc_flow(1.0, 1.0, 1.0, grid);
    } else if (initial == "tg") {
      u0 = taylor_green(grid);
    } else if (initial == "band") {
      u0 = random_band_limited(grid, seed, static_cast<int>(P.integer("kmax", 4)), Rank::vector3, true);
    } else if (initial == "lacunary") {
      LacunarySpec spec;
      spec.exponent = P.number("exponent", 0.5);
      spec.octaves = static_cast<int>(P.integer("octaves", 3));
      spec.seed = seed;
      spec.rank = Rank::vector3;
      spec.divergence_free = true;
      u0 = lacunary_field(spec, grid);
    } else {
      throw Error(ErrorCode::config, "unknown initial condition '" + initial + "'");
    }
  }
  EvolveConfig config;
  config.dt = P.number("dt");
  config.final_time = P.number("T");
  config.deltas = P.has("delta_list") ? P.numbers("delta_list") : std::vector<double>{};
  config.pairs = read_pairs(P, "");
  config.sample_every = P.integer("sample_every", 1);
  const bool checkpoint = P.flag("checkpoint");
  ctx.outputs.open(P);

  Trajectory traj;
  try {
    traj = evolve(*u0, config);
  } catch (const BlowUpError& e) {
    if (ctx.outputs.dir && e.last_good()) {
      ctx.outputs.field_file(*ctx.outputs.dir / "last_good.f1", PeriodicField(e.last_good()->velocity));
    }
    throw;
  }
  CsvTable table{trajectory_columns(config), {}};
  for (const auto& row : trajectory_rows(traj)) {
    std::vector<std::string> cells;
    for (double v : row) cells.push_back(format_number(v));
    table.rows.push_back(std::move(cells));
  }
  const auto& first = traj.samples.front();
  const auto& last = traj.samples.back();
  auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a - b) : std::abs(a - b) / std::abs(b); };
  json summary = {{"samples", traj.samples.size()},
                  {"steps", traj.final_state->step},
                  {"E0", first.energy},
                  {"H0", first.helicity},
                  {"E_drift", rel(last.energy, first.energy)},
                  {"H_drift", rel(last.helicity, first.helicity)}};
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("trajectory.csv", to_csv(table));
    if (checkpoint) ctx.outputs.field_file(*ctx.outputs.dir / "final_state.f1", PeriodicField(traj.final_state->velocity));
    ctx.finish(*ctx.outputs.dir / "manifest.json");
    ctx.out << summary.dump() << "\n";
  } else {
    ctx.out << to_csv(table);
  }
  return 0;
}

int cmd_report(Context& ctx) {
  Params& P = ctx.params;
  std::vector<fs::path> dirs;
  for (const auto& s : P.items("run_dirs")) dirs.emplace_back(s);
  ctx.outputs.open(P);
  for (const auto& d : dirs) ctx.outputs.inputs.push_back(d / "sweep.csv");
  const ReportResult r = report(dirs);
  if (ctx.outputs.dir) {
    ctx.outputs.text_file("merged.csv", to_csv(r.merged));
    ctx.outputs.text_file("merged.json", r.summary.dump(2) + "\n");
    ctx.finish(*ctx.outputs.dir / "manifest.json");
    ctx.out << r.summary.dump() << "\n";
  } else {
    ctx.out << to_csv(r.merged);
  }
  return 0;
}

int dispatch(const std::string& name, Context& ctx) {
  if (name == "synthesize") return cmd_synthesize(ctx);
  if (name == "norms") return cmd_norms(ctx);
  if (name == "mollify-sweep") return cmd_mollify_sweep(ctx);
  if (name == "helicity") return cmd_helicity(ctx);
  if (name == "regime-check") return cmd_regime_check(ctx);
  if (name == "evolve") return cmd_evolve(ctx);
  if (name == "report") return cmd_report(ctx);
  throw Error(ErrorCode::config, "unknown subcommand " + name);
}

void emit_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral helicity toolkit for periodic 3D flows", "helicity_lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolkit_version);

  struct Bound {
    const CommandSpec* spec;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::vector<std::string> positional;
    std::string config;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& spec : commands()) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->app = app.add_subcommand(spec.name, spec.help);
    b->app->add_option("--config", b->config, "JSON config file; command-line values take precedence");
    for (const auto& key : spec.keys) {
      const std::string name = std::string("--") + key.name;
      if (key.flag) {
        b->app->add_flag(name, b->flags[key.name], key.help);
      } else if (spec.positional && std::string(key.name) == spec.positional) {
        continue;
      } else {
        const std::string names = std::string(key.name) == "output" ? "-o," + name : name;
        b->app->add_option(names, b->values[key.name], key.help);
      }
    }
    if (spec.positional) {
      auto* opt = b->app->add_option(std::string(spec.positional), b->positional, "input path(s)");
      if (!spec.positional_many) opt->expected(1);
    }
    bound.push_back(std::move(b));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << toolkit_version << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "config", e.what());
    return 1;
  }

  for (auto& b : bound) {
    if (!b->app->parsed()) continue;
    try {
      json config = b->config.empty() ? json::object() : load_config(b->config);
      std::map<std::string, std::string> cli;
      for (const auto& key : b->spec->keys) {
        const std::string name = std::string("--") + key.name;
        if (key.flag) {
          if (b->flags[key.name]) cli[key.name] = "true";
        } else if (b->spec->positional && std::string(key.name) == b->spec->positional) {
          if (!b->positional.empty()) {
            std::string joined;
            for (const auto& p : b->positional) joined += (joined.empty() ? "" : ",") + p;
            cli[key.name] = joined;
          }
        } else if (b->app->count(name) > 0) {
          cli[key.name] = b->values[key.name];
        }
      }
      Params params(*b->spec, std::move(config), std::move(cli));
      Context ctx{b->spec->name, params, {}, out};
      return dispatch(b->spec->name, ctx);
    } catch (const NumericalError& e) {
      emit_error(err, error_code_name(e.code()), e.what());
      return 2;
    } catch (const Error& e) {
      emit_error(err, error_code_name(e.code()), e.what());
      return 1;
    } catch (const json::exception& e) {
      emit_error(err, "config", e.what());
      return 1;
    } catch (const fs::filesystem_error& e) {
      emit_error(err, "io", e.what());
      return 1;
    }
  }
  emit_error(err, "config", "no subcommand given");
  return 1;
}

}  // namespace helab::harness
