#include "phenocurve/simulation.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "phenocurve/errors.hpp"
#include "phenocurve/harmonic.hpp"
#include "phenocurve/parallel.hpp"

namespace phenocurve {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::result_type RngStream::operator()() {
  const std::uint64_t key = mix64(seed_ ^ mix64(stream_ + kGolden));
  return mix64(key + (++counter_) * kGolden);
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(mix64(seed_ + kGolden * (stream_ + 1)), id);
}

void SimConfig::validate() const {
  if (reps < 1) throw SchemaError("reps", "must be >= 1");
  if (period < 3) throw SchemaError("base.period", "must be >= 3");
  if (seasons < 2) throw SchemaError("seasons", "must be >= 2");
  if (!(c1 > 0.0)) throw SchemaError("base.c1", "must be positive");
  if (!(phase_deg > 0.0 && phase_deg < 360.0)) throw SchemaError("base.phase_deg", "must lie in (0, 360)");
  if (noise.kind == NoiseKind::Homoscedastic && !(noise.sigma > 0.0)) {
    throw SchemaError("noise.sigma", "must be positive");
  }
  if (noise.kind == NoiseKind::Heteroscedastic) {
    if (!(noise.df >= 1.0)) throw SchemaError("noise.df", "must be >= 1");
    if (!(noise.season_sd >= 0.0)) throw SchemaError("noise.season_sd", "must be non-negative");
  }
  try {
    estimator.validate();
  } catch (const Error& e) {
    throw SchemaError("estimator", e.what());
  }
}

PixelSeries gen_base(const SimConfig& config) {
  PixelSeries series;
  series.grid = ObservationGrid::make(config.period, config.seasons);
  const auto model = HarmonicModel::single_cosine(config.c0, config.c1, config.period, config.phase_deg);
  series.values.resize(series.grid.size());
  series.missing.assign(series.grid.size(), false);
  for (int s = 0; s < config.seasons; ++s) {
    for (int t = 1; t <= config.period; ++t) {
      series.values[static_cast<std::size_t>(s * config.period + t - 1)] = model(t);
    }
  }
  return series;
}

PixelSeries gen_homoscedastic(const SimConfig& config, RngStream& rng) {
  require(config.noise.sigma > 0.0, "gen_homoscedastic: sigma must be positive");
  auto series = gen_base(config);
  std::normal_distribution<double> noise(0.0, config.noise.sigma);
  for (double& v : series.values) v += noise(rng);
  return series;
}

PixelSeries gen_heteroscedastic(const SimConfig& config, RngStream& rng) {
  require(config.noise.df >= 1.0, "gen_heteroscedastic: df must be >= 1");
  require(config.noise.season_sd >= 0.0, "gen_heteroscedastic: season_sd must be non-negative");
  auto series = gen_base(config);
  std::normal_distribution<double> shift(0.0, 1.0);
  std::chi_squared_distribution<double> chi(config.noise.df);
  std::vector<double> per_position(static_cast<std::size_t>(config.period));
  for (double& v : per_position) v = chi(rng);
  for (int s = 0; s < config.seasons; ++s) {
    const double season_shift = config.noise.season_sd * shift(rng);
    for (int t = 0; t < config.period; ++t) {
      series.values[static_cast<std::size_t>(s * config.period + t)] +=
          season_shift + per_position[static_cast<std::size_t>(t)];
    }
  }
  return series;
}

PixelSeries generate(const SimConfig& config, RngStream& rng) {
  switch (config.noise.kind) {
    case NoiseKind::None: return gen_base(config);
    case NoiseKind::Homoscedastic: return gen_homoscedastic(config, rng);
    case NoiseKind::Heteroscedastic: return gen_heteroscedastic(config, rng);
  }
  return gen_base(config);
}

MseTable run_study(const SimConfig& config) {
  config.validate();
  const auto truth = closed_form_phenodates(config.c0, config.c1, config.period, config.phase_deg);
  const auto basis = build_dr_basis(config.estimator.grid_n, config.estimator.samples);
  const RngStream root(config.seed, 0);

  // Per rep: squared error per scored date, nullopt when excluded; empty on failure.
  std::vector<std::optional<std::array<std::optional<double>, 4>>> outcomes(
      static_cast<std::size_t>(config.reps));
  parallel_for(outcomes.size(), config.estimator.workers, [&](std::size_t r) {
    auto rng = root.substream(r);
    const auto series = generate(config, rng);
    try {
      const auto result = fit_pixel(series, config.estimator, basis);
      std::array<std::optional<double>, 4> errors{};
      for (std::size_t k = 0; k < kScoredPhases.size(); ++k) {
        const auto& est = result.dates[kScoredPhases[k]];
        const auto& ref = truth[kScoredPhases[k]];
        if (est && ref) {
          const double d = est->position - ref->position;
          errors[k] = d * d;
        }
      }
      outcomes[r] = errors;
    } catch (const Error&) {
      outcomes[r].reset();
    }
  });

  MseRow row;
  row.num_freq = config.estimator.num_freq;
  row.noise = config.noise;
  row.distance = config.estimator.distance;
  row.reps = config.reps;
  std::array<double, 4> sums{};
  std::array<int, 4> counts{};
  for (const auto& o : outcomes) {
    if (!o) {
      ++row.failures;
      for (auto& e : row.excluded) ++e;
      continue;
    }
    for (std::size_t k = 0; k < 4; ++k) {
      if ((*o)[k]) {
        sums[k] += *(*o)[k];
        ++counts[k];
      } else {
        ++row.excluded[k];
      }
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    row.mse[k] = counts[k] > 0 ? sums[k] / counts[k] : std::numeric_limits<double>::quiet_NaN();
    row.truth_absent[k] = truth[kScoredPhases[k]] ? 0 : config.reps;
  }
  MseTable table;
  table.rows.push_back(row);
  return table;
}

MseTable run_studies(const std::vector<SimConfig>& configs) {
  MseTable table;
  for (const auto& c : configs) {
    auto part = run_study(c);
    table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
  }
  return table;
}

namespace {

using nlohmann::json;

const json* field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw SchemaError(path + key, "expected a number");
  return v->get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& path, int fallback) {
  const json* v = field(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw SchemaError(path + key, "expected an integer");
  return v->get<int>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw SchemaError(path + key, "unknown field");
  }
}

NoiseModel parse_noise(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  reject_unknown(obj, {"kind", "sigma", "df", "season_sd"}, path + ".");
  NoiseModel noise;
  const json* kind = field(obj, "kind");
  if (!kind || !kind->is_string()) throw SchemaError(path + ".kind", "expected a string");
  const auto name = kind->get<std::string>();
  if (name == "homoscedastic") {
    noise.kind = NoiseKind::Homoscedastic;
  } else if (name == "heteroscedastic") {
    noise.kind = NoiseKind::Heteroscedastic;
  } else if (name == "none") {
    noise.kind = NoiseKind::None;
  } else {
    throw SchemaError(path + ".kind", "expected homoscedastic, heteroscedastic or none");
  }
  noise.sigma = get_number(obj, "sigma", path + ".", noise.sigma);
  noise.df = get_number(obj, "df", path + ".", noise.df);
  noise.season_sd = get_number(obj, "season_sd", path + ".", noise.season_sd);
  if (noise.kind == NoiseKind::Homoscedastic && !(noise.sigma > 0.0)) {
    throw SchemaError(path + ".sigma", "must be positive");
  }
  if (noise.kind == NoiseKind::Heteroscedastic && !(noise.df >= 1.0)) {
    throw SchemaError(path + ".df", "must be >= 1");
  }
  return noise;
}

RunConfig parse_estimator(const json& obj, const std::string& path, int workers) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  reject_unknown(obj,
                 {"num_freq", "distance", "h", "samples", "grid_n", "dense_n", "dominating_threshold",
                  "max_iter", "tol", "refit_num_freq"},
                 path + ".");
  RunConfig c;
  c.num_freq = get_int(obj, "num_freq", path + ".", 1);
  c.h = get_int(obj, "h", path + ".", c.h);
  c.samples = get_int(obj, "samples", path + ".", c.samples);
  c.grid_n = get_int(obj, "grid_n", path + ".", c.grid_n);
  c.dense_n = get_int(obj, "dense_n", path + ".", c.dense_n);
  c.max_iter = get_int(obj, "max_iter", path + ".", c.max_iter);
  c.tol = get_number(obj, "tol", path + ".", c.tol);
  if (field(obj, "dominating_threshold")) {
    c.dominating_threshold = get_int(obj, "dominating_threshold", path + ".", 0);
  }
  if (field(obj, "refit_num_freq")) c.refit_num_freq = get_int(obj, "refit_num_freq", path + ".", 0);
  if (const json* d = field(obj, "distance")) {
    if (!d->is_string()) throw SchemaError(path + ".distance", "expected a string");
    const auto v = parse_dtw_variant(d->get<std::string>());
    if (!v) throw SchemaError(path + ".distance", "expected dtw_basic or dtw2");
    c.distance = *v;
  }
  c.workers = workers;
  try {
    c.validate();
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return c;
}

}  // namespace

std::vector<SimConfig> parse_study_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", e.what());
  }
  if (!root.is_object()) throw SchemaError("<document>", "expected a JSON object");
  reject_unknown(root, {"base", "seasons", "reps", "seed", "workers", "noise", "estimators"}, "");

  SimConfig proto;
  if (const json* base = field(root, "base")) {
    if (!base->is_object()) throw SchemaError("base", "expected an object");
    reject_unknown(*base, {"c0", "c1", "period", "phase_deg"}, "base.");
    proto.c0 = get_number(*base, "c0", "base.", proto.c0);
    proto.c1 = get_number(*base, "c1", "base.", proto.c1);
    proto.period = get_int(*base, "period", "base.", proto.period);
    proto.phase_deg = get_number(*base, "phase_deg", "base.", proto.phase_deg);
  }
  proto.seasons = get_int(root, "seasons", "", proto.seasons);
  proto.reps = get_int(root, "reps", "", proto.reps);
  if (const json* seed = field(root, "seed")) {
    if (!seed->is_number_unsigned()) throw SchemaError("seed", "expected a non-negative integer");
    proto.seed = seed->get<std::uint64_t>();
  }
  const int workers = get_int(root, "workers", "", 1);
  if (workers < 1) throw SchemaError("workers", "must be >= 1");

  std::vector<NoiseModel> noises;
  const json* noise = field(root, "noise");
  if (!noise) throw SchemaError("noise", "required");
  if (noise->is_array()) {
    if (noise->empty()) throw SchemaError("noise", "must not be empty");
    for (std::size_t i = 0; i < noise->size(); ++i) {
      noises.push_back(parse_noise((*noise)[i], "noise[" + std::to_string(i) + "]"));
    }
  } else {
    noises.push_back(parse_noise(*noise, "noise"));
  }

  std::vector<RunConfig> estimators;
  const json* est = field(root, "estimators");
  if (!est) {
    estimators.push_back(parse_estimator(json::object(), "estimators", workers));
  } else if (est->is_array()) {
    if (est->empty()) throw SchemaError("estimators", "must not be empty");
    for (std::size_t i = 0; i < est->size(); ++i) {
      estimators.push_back(parse_estimator((*est)[i], "estimators[" + std::to_string(i) + "]", workers));
    }
  } else {
    estimators.push_back(parse_estimator(*est, "estimators", workers));
  }

  std::vector<SimConfig> out;
  for (const auto& n : noises) {
    for (const auto& e : estimators) {
      SimConfig c = proto;
      c.noise = n;
      c.estimator = e;
      c.validate();
      out.push_back(c);
    }
  }
  return out;
}

std::vector<SimConfig> load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open study config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_study_config(text.str());
}

}  // namespace phenocurve
