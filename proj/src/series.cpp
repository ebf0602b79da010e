#include "phenocurve/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '"')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '"')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool is_missing(const std::string& cell) { return cell == "NA"; }

bool looks_like_header(std::span<const std::string> cells) {
  for (const auto& c : cells) {
    if (is_missing(c) || parse_number(c)) return false;
  }
  return true;
}

struct CsvRow {
  std::size_t line_number;
  std::vector<std::string> cells;
};

std::vector<CsvRow> read_rows(const std::filesystem::path& path, std::size_t skip_columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      const auto data_cells = std::span<const std::string>(cells).subspan(
          std::min(skip_columns, cells.size()));
      if (looks_like_header(data_cells)) continue;
    }
    rows.push_back({line_number, std::move(cells)});
  }
  return rows;
}

}  // namespace

void ObservationGrid::validate() const {
  if (per_season_len < 3) {
    throw Error(ErrorKind::Contract, "observation grid: season length must be >= 3");
  }
  if (seasons < 2) throw Error(ErrorKind::Contract, "observation grid: need at least 2 seasons");
  if (season_labels.size() != static_cast<std::size_t>(seasons)) {
    throw Error(ErrorKind::Contract, "observation grid: one label per season required");
  }
}

ObservationGrid ObservationGrid::make(int per_season_len, int seasons, int first_year) {
  ObservationGrid grid;
  grid.per_season_len = per_season_len;
  grid.seasons = seasons;
  for (int s = 0; s < seasons; ++s) {
    grid.season_labels.push_back(std::to_string(first_year != 0 ? first_year + s : s + 1));
  }
  grid.validate();
  return grid;
}

void PixelSeries::validate() const {
  grid.validate();
  if (values.size() != grid.size() || missing.size() != grid.size()) {
    throw Error(ErrorKind::MalformedInput, "pixel series: expected " + std::to_string(grid.size()) +
                                               " values, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!missing[i] && !std::isfinite(values[i])) {
      throw Error(ErrorKind::MalformedInput, "pixel series: non-finite observed value");
    }
  }
}

PixelSeries PixelSeries::scaled(double factor) const {
  PixelSeries out = *this;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.missing[i]) out.values[i] *= factor;
  }
  return out;
}

CurveMatrix CurveMatrix::select(std::span<const std::size_t> columns) const {
  CurveMatrix out;
  out.period = period;
  out.samples.resize(samples.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    require(columns[j] < static_cast<std::size_t>(samples.cols()), "CurveMatrix::select: bad column");
    out.samples.col(static_cast<Eigen::Index>(j)) = samples.col(static_cast<Eigen::Index>(columns[j]));
    if (columns[j] < season_labels.size()) out.season_labels.push_back(season_labels[columns[j]]);
  }
  return out;
}

PixelSeries parse_pixel_row(std::span<const std::string> cells, const ObservationGrid& grid,
                            std::size_t row_number) {
  grid.validate();
  if (cells.size() != grid.size()) {
    throw Error(ErrorKind::MalformedInput,
                "row " + std::to_string(row_number) + ": expected " + std::to_string(grid.size()) +
                    " cells (L*S), got " + std::to_string(cells.size()));
  }
  PixelSeries series;
  series.grid = grid;
  series.values.resize(cells.size(), std::numeric_limits<double>::quiet_NaN());
  series.missing.assign(cells.size(), false);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (is_missing(cells[i])) {
      series.missing[i] = true;
      continue;
    }
    const auto v = parse_number(cells[i]);
    if (!v) throw ParseError(row_number, i + 1, cells[i]);
    series.values[i] = *v;
  }
  return series;
}

PixelSeries load_pixel_csv(const std::filesystem::path& path, int season_len, int seasons,
                           int first_year) {
  const auto grid = ObservationGrid::make(season_len, seasons, first_year);
  const auto rows = read_rows(path, 0);
  if (rows.empty()) throw Error(ErrorKind::MalformedInput, path.string() + ": no data rows");
  return parse_pixel_row(rows.front().cells, grid, rows.front().line_number);
}

std::vector<PolygonPixel> load_polygon_csv(const std::filesystem::path& path, int season_len,
                                           int seasons, int first_year) {
  const auto grid = ObservationGrid::make(season_len, seasons, first_year);
  const auto rows = read_rows(path, 1);
  if (rows.empty()) throw Error(ErrorKind::MalformedInput, path.string() + ": no pixel rows");
  std::vector<PolygonPixel> pixels;
  pixels.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.cells.size() != grid.size() + 1) {
      throw Error(ErrorKind::MalformedInput,
                  "row " + std::to_string(row.line_number) + ": expected pixel id plus " +
                      std::to_string(grid.size()) + " cells, got " + std::to_string(row.cells.size()));
    }
    PolygonPixel pixel;
    pixel.id = row.cells.front();
    // Column positions reported to the user include the id column.
    try {
      pixel.series = parse_pixel_row(std::span<const std::string>(row.cells).subspan(1), grid,
                                     row.line_number);
    } catch (const ParseError& e) {
      throw ParseError(e.row(), e.column() + 1, row.cells[e.column()]);
    }
    pixels.push_back(std::move(pixel));
  }
  return pixels;
}

std::size_t SeasonSplit::usable_count() const {
  std::size_t n = 0;
  for (bool u : usable) n += u ? 1 : 0;
  return n;
}

std::vector<double> SeasonSplit::concatenated() const {
  std::vector<double> out;
  for (const auto& s : seasons) out.insert(out.end(), s.begin(), s.end());
  return out;
}

SeasonSplit split_seasons(const PixelSeries& series, int num_freq) {
  series.validate();
  require(num_freq >= 1, "split_seasons: num_freq must be >= 1");
  const auto len = static_cast<std::size_t>(series.grid.per_season_len);
  const std::size_t min_points = 2 * static_cast<std::size_t>(num_freq) + 1;

  SeasonSplit split;
  split.labels = series.grid.season_labels;
  for (int s = 0; s < series.grid.seasons; ++s) {
    const std::size_t offset = static_cast<std::size_t>(s) * len;
    std::vector<double> season(series.values.begin() + static_cast<std::ptrdiff_t>(offset),
                               series.values.begin() + static_cast<std::ptrdiff_t>(offset + len));
    std::vector<std::size_t> observed;
    for (std::size_t t = 0; t < len; ++t) {
      if (!series.missing[offset + t]) observed.push_back(t);
    }

    if (!observed.empty()) {
      for (std::size_t t = 0; t < len; ++t) {
        if (!series.missing[offset + t]) continue;
        // Neighbouring observed indices around t.
        auto it = std::lower_bound(observed.begin(), observed.end(), t);
        if (it == observed.begin()) {
          season[t] = season[*it];
        } else if (it == observed.end()) {
          season[t] = season[observed.back()];
        } else {
          const std::size_t hi = *it;
          const std::size_t lo = *(it - 1);
          const double w = static_cast<double>(t - lo) / static_cast<double>(hi - lo);
          season[t] = (1.0 - w) * season[lo] + w * season[hi];
        }
      }
    }
    split.usable.push_back(observed.size() >= min_points);
    split.seasons.push_back(std::move(season));
  }
  return split;
}

CurveMatrix resample_curves(std::span<const HarmonicModel> models, int grid_n,
                            std::vector<std::string> labels) {
  require(grid_n >= 2, "resample_curves: grid_n must be >= 2");
  require(!models.empty(), "resample_curves: no models");
  const double period = models.front().period;
  for (const auto& m : models) {
    require(m.period == period, "resample_curves: models must share the same period");
  }
  CurveMatrix out;
  out.period = period;
  out.samples.resize(grid_n, static_cast<Eigen::Index>(models.size()));
  for (int i = 0; i < grid_n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_n - 1);
    for (std::size_t j = 0; j < models.size(); ++j) {
      out.samples(i, static_cast<Eigen::Index>(j)) = eval_harmonic(models[j], x * period);
    }
  }
  if (labels.empty()) {
    for (std::size_t j = 0; j < models.size(); ++j) labels.push_back(std::to_string(j + 1));
  }
  require(labels.size() == models.size(), "resample_curves: one label per model required");
  out.season_labels = std::move(labels);
  return out;
}

}  // namespace phenocurve
