#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "phenocurve/pipeline.hpp"
#include "phenocurve/series.hpp"

namespace phenocurve {

/// Counter-based 64-bit generator: output k of stream s is splitmix64(seed, s, k).
/// Streams with different ids are independent, so reps can run in any order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

enum class NoiseKind { None, Homoscedastic, Heteroscedastic };

struct NoiseModel {
  NoiseKind kind = NoiseKind::Homoscedastic;
  double sigma = 0.15;       // homoscedastic standard deviation
  double df = 1.0;           // chi-square degrees of freedom
  double season_sd = 0.7229;  // per-season shift standard deviation
};

struct SimConfig {
  double c0 = 0.0;
  double c1 = 1.0;
  int period = 23;          // observations per season
  double phase_deg = 210.0;
  int seasons = 24;         // 24 * 23 = 552 observations
  NoiseModel noise;
  int reps = 200;
  RunConfig estimator;      // pipeline settings (num_freq, distance, h, samples, ...)
  std::uint64_t seed = 1;

  void validate() const;
};

// Noise-free base signal c0 + c1 cos(2 pi t / L - phase) at t = 1..L, repeated for every season.
PixelSeries gen_base(const SimConfig& config);
PixelSeries gen_homoscedastic(const SimConfig& config, RngStream& rng);
PixelSeries gen_heteroscedastic(const SimConfig& config, RngStream& rng);
// Dispatches on config.noise.kind.
PixelSeries generate(const SimConfig& config, RngStream& rng);

// Dates scored by the studies.
inline constexpr std::array<Phase, 4> kScoredPhases = {Phase::GreenUp, Phase::StartOfSeason,
                                                       Phase::Maturity, Phase::EndOfSeason};

struct MseRow {
  int num_freq = 1;
  NoiseModel noise;
  DtwVariant distance = DtwVariant::Basic;
  std::array<double, 4> mse{};        // NaN when every rep was excluded
  std::array<int, 4> excluded{};      // reps without the date (or failed)
  std::array<int, 4> truth_absent{};  // 1 per rep when the true date does not exist
  int reps = 0;
  int failures = 0;

  double failure_rate() const { return reps > 0 ? static_cast<double>(failures) / reps : 0.0; }
};

struct MseTable {
  std::vector<MseRow> rows;
};

/// Monte Carlo study: generate, run the pipeline, score GU/SoS/Mat/EoS against the closed-form
/// dates of the base signal. Reps run on estimator.workers threads; results do not depend on it.
MseTable run_study(const SimConfig& config);
MseTable run_studies(const std::vector<SimConfig>& configs);

/// Study configs from JSON. Every noise setting is crossed with every estimator setting.
/// Throws SchemaError naming the offending field.
std::vector<SimConfig> parse_study_config(const std::string& json_text);
std::vector<SimConfig> load_study_config(const std::filesystem::path& path);

}  // namespace phenocurve
