#include "phenocurve/dates.hpp"

#include <cmath>

#include "phenocurve/errors.hpp"

namespace phenocurve {

std::string_view phase_code(Phase phase) {
  switch (phase) {
    case Phase::GreenUp: return "GU";
    case Phase::StartOfSeason: return "SoS";
    case Phase::Maturity: return "Mat";
    case Phase::Senescence: return "Sen";
    case Phase::EndOfSeason: return "EoS";
    case Phase::Dormancy: return "Dor";
  }
  return "?";
}

std::optional<Phase> phase_from_code(std::string_view code) {
  for (Phase p : kPhases) {
    if (phase_code(p) == code) return p;
  }
  return std::nullopt;
}

std::vector<std::string> PhenoDates::flag_names() const {
  std::vector<std::string> names;
  if (has(DateFlag::OrderingViolated)) names.emplace_back("OrderingViolated");
  if (has(DateFlag::SenEqualsMat)) names.emplace_back("SenEqualsMat");
  if (has(DateFlag::MissingGU)) names.emplace_back("MissingGU");
  if (has(DateFlag::MissingDor)) names.emplace_back("MissingDor");
  if (has(DateFlag::MissingSen)) names.emplace_back("MissingSen");
  for (Phase p : sign_failures) {
    names.push_back("SignConditionFailed(" + std::string(phase_code(p)) + ")");
  }
  return names;
}

PhenoDates PhenoDates::from_doy(const std::array<std::optional<int>, 6>& doys, double period) {
  require(period > 0.0, "from_doy: period must be positive");
  PhenoDates out;
  out.period = period;
  for (std::size_t i = 0; i < doys.size(); ++i) {
    if (!doys[i]) continue;
    require(*doys[i] >= 1 && *doys[i] <= 365, "from_doy: day of year outside 1..365");
    out.dates[i] = PhenoDate{*doys[i] * period / 365.0, *doys[i]};
  }
  return out;
}

int to_doy(double position, double period) {
  require(period > 0.0, "to_doy: period must be positive");
  require(position >= 0.0 && position <= period,
          "to_doy: position " + std::to_string(position) + " outside [0, period]");
  const long doy = std::lround(365.0 * position / period);
  if (doy < 1) return 1;
  if (doy > 365) return 365;
  return static_cast<int>(doy);
}

OrderingCheck check_ordering(const PhenoDates& dates) {
  OrderingCheck check;
  std::optional<double> previous;
  for (Phase p : kPhases) {
    const auto& d = dates[p];
    if (!d) continue;
    if (previous && !(d->position > *previous)) {
      check.ordered = false;
    }
    previous = d->position;
  }
  if (!check.ordered) check.flags |= static_cast<std::uint32_t>(DateFlag::OrderingViolated);
  return check;
}

}  // namespace phenocurve
