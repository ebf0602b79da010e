#pragma once

#include "phenocurve/dates.hpp"
#include "phenocurve/fpca.hpp"
#include "phenocurve/harmonic.hpp"

namespace phenocurve {

/// Dates from a harmonic model via its derivatives on a dense grid of `dense_n` points over
/// [0, period]. Throws a DegenerateCurve error for constant models.
PhenoDates phenodates_from_model(const HarmonicModel& model, int dense_n = 3650);

/// Refits a harmonic model with `num_freq` frequencies to the trend samples (t = x * period),
/// then extracts the six dates. dense_n must be at least 10 * grid_n.
PhenoDates extract_phenodates(const TrendCurve& trend, int num_freq, int dense_n = 3650);

}  // namespace phenocurve
