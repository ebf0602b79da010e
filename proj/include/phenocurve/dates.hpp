#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phenocurve {

// Canonical order of the six phenological events.
enum class Phase : int { GreenUp = 0, StartOfSeason, Maturity, Senescence, EndOfSeason, Dormancy };

inline constexpr std::array<Phase, 6> kPhases = {Phase::GreenUp,   Phase::StartOfSeason,
                                                 Phase::Maturity,  Phase::Senescence,
                                                 Phase::EndOfSeason, Phase::Dormancy};

std::string_view phase_code(Phase phase);  // "GU", "SoS", ...
std::optional<Phase> phase_from_code(std::string_view code);

enum class DateFlag : std::uint32_t {
  OrderingViolated = 1u << 0,
  SenEqualsMat = 1u << 1,
  MissingGU = 1u << 2,
  MissingDor = 1u << 3,
  MissingSen = 1u << 4,
  SignConditionFailed = 1u << 5,
};

struct PhenoDate {
  double position = 0.0;  // within-season time in [0, period]
  int doy = 1;            // day of year in 1..365
};

struct PhenoDates {
  double period = 0.0;
  std::array<std::optional<PhenoDate>, 6> dates{};
  std::uint32_t flags = 0;
  std::vector<Phase> sign_failures;  // phases whose derivative sign test failed

  const std::optional<PhenoDate>& operator[](Phase p) const { return dates[static_cast<int>(p)]; }
  std::optional<PhenoDate>& operator[](Phase p) { return dates[static_cast<int>(p)]; }

  bool has(DateFlag f) const { return (flags & static_cast<std::uint32_t>(f)) != 0; }
  void set(DateFlag f) { flags |= static_cast<std::uint32_t>(f); }
  void clear(DateFlag f) { flags &= ~static_cast<std::uint32_t>(f); }

  // Flag names, e.g. {"SenEqualsMat", "SignConditionFailed(GU)"}.
  std::vector<std::string> flag_names() const;

  /// Builds a record from day-of-year values; positions are DoY * period / 365.
  static PhenoDates from_doy(const std::array<std::optional<int>, 6>& doys, double period);
};

// round(365 * position / period) clamped to [1, 365]; position must lie in [0, period].
int to_doy(double position, double period);

struct OrderingCheck {
  bool ordered = true;
  std::uint32_t flags = 0;
};

/// True when every present date strictly increases GU < SoS < Mat < Sen < EoS < Dor.
/// Positions are compared, so DoY-only records should come from PhenoDates::from_doy.
OrderingCheck check_ordering(const PhenoDates& dates);

}  // namespace phenocurve
