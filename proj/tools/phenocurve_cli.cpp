// phenocurve command-line tool: per-pixel and per-polygon date extraction, simulation studies
// and SVG figures.

#include <array>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phenocurve/errors.hpp"
#include "phenocurve/pipeline.hpp"
#include "phenocurve/polygon.hpp"
#include "phenocurve/serialize.hpp"
#include "phenocurve/series.hpp"
#include "phenocurve/simulation.hpp"
#include "phenocurve/svg.hpp"

namespace pc = phenocurve;

namespace {

struct InputOptions {
  std::string input;
  int season_len = 23;
  int seasons = 0;
  int first_year = 0;
};

struct RunFlags {
  pc::RunConfig config;
  std::string distance = "dtw_basic";
  int dominating_threshold = 0;
  int refit_num_freq = 0;

  pc::RunConfig resolve() const {
    pc::RunConfig c = config;
    const auto v = pc::parse_dtw_variant(distance);
    if (!v) throw pc::Error(pc::ErrorKind::MalformedInput, "unknown distance '" + distance + "'");
    c.distance = *v;
    if (dominating_threshold > 0) c.dominating_threshold = dominating_threshold;
    if (refit_num_freq > 0) c.refit_num_freq = refit_num_freq;
    try {
      c.validate();
    } catch (const pc::Error& e) {
      throw pc::Error(pc::ErrorKind::MalformedInput, e.what());
    }
    return c;
  }
};

void add_input(CLI::App* cmd, InputOptions& in, bool polygon) {
  cmd->add_option("-i,--input", in.input, polygon ? "Polygon CSV (pixel id, then L*S values)"
                                                  : "Pixel CSV (one row of L*S values)")
      ->required();
  cmd->add_option("--season-len", in.season_len, "Observations per season (L)");
  cmd->add_option("--seasons", in.seasons, "Number of seasons (S)")->required();
  cmd->add_option("--first-year", in.first_year, "Label seasons with calendar years from this one");
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  auto& c = f.config;
  cmd->add_option("--num-freq", c.num_freq, "Harmonics per season")->capture_default_str();
  cmd->add_option("--distance", f.distance, "dtw_basic or dtw2")->capture_default_str();
  cmd->add_option("--h", c.h, "Principal components")->capture_default_str();
  cmd->add_option("--samples", c.samples, "Basis size K")->capture_default_str();
  cmd->add_option("--grid-n", c.grid_n, "Common grid size")->capture_default_str();
  cmd->add_option("--dense-n", c.dense_n, "Derivative grid size")->capture_default_str();
  cmd->add_option("--dominating-threshold", f.dominating_threshold,
                  "Minimum size of the dominating cluster (default ceil(0.6 m))");
  cmd->add_option("--trim-z", c.trim_z, "Trimming z-value")->capture_default_str();
  cmd->add_option("--mad-scale", c.mad_scale, "MAD consistency factor")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--max-iter", c.max_iter, "FPCA iteration limit")->capture_default_str();
  cmd->add_option("--tol", c.tol, "FPCA convergence tolerance")->capture_default_str();
  cmd->add_option("--value-scale", c.value_scale, "Factor applied to raw values")->capture_default_str();
  cmd->add_option("--refit-num-freq", f.refit_num_freq,
                  "Harmonics for the trend re-fit (default: --num-freq)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pc::Error(pc::ErrorKind::MalformedInput, "cannot write " + path);
  out << text;
  if (!out) throw pc::Error(pc::ErrorKind::MalformedInput, "write failed for " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Reads the dates table written by fit-polygon (id, six DoY columns, ...).
std::vector<pc::PhenoDates> read_dates_csv(const std::string& path, double period) {
  std::ifstream in(path);
  if (!in) throw pc::Error(pc::ErrorKind::MalformedInput, "cannot open " + path);
  std::string line;
  std::vector<pc::PhenoDates> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (row == 1 && line.rfind("id,", 0) == 0)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 7) {
      throw pc::Error(pc::ErrorKind::MalformedInput,
                      "row " + std::to_string(row) + ": expected id and six date columns");
    }
    std::array<std::optional<int>, 6> doys{};
    bool any = false;
    for (std::size_t k = 0; k < 6; ++k) {
      const auto& c = cells[k + 1];
      if (c.empty() || c == "NA") continue;
      try {
        std::size_t used = 0;
        const int v = std::stoi(c, &used);
        if (used != c.size() || v < 1 || v > 365) throw std::invalid_argument(c);
        doys[k] = v;
        any = true;
      } catch (const std::exception&) {
        throw pc::ParseError(row, k + 2, c);
      }
    }
    if (any) out.push_back(pc::PhenoDates::from_doy(doys, period));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Land-surface phenology from satellite vegetation-index time series"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  InputOptions in;
  RunFlags flags;
  std::string json_out, csv_out, svg_out, summary_out, config_path;

  auto* fit_pixel = app.add_subcommand("fit-pixel", "Dates of one pixel as JSON");
  add_input(fit_pixel, in, false);
  add_run_flags(fit_pixel, flags);
  fit_pixel->add_option("-o,--output", json_out, "JSON output (default stdout)");
  fit_pixel->add_option("--csv", csv_out, "One-row dates CSV");
  fit_pixel->add_option("--svg", svg_out, "Profile plot SVG");

  auto* fit_polygon = app.add_subcommand("fit-polygon", "Dates of every pixel plus a polygon summary");
  add_input(fit_polygon, in, true);
  add_run_flags(fit_polygon, flags);
  fit_polygon->add_option("--csv", csv_out, "Per-pixel dates CSV (default stdout)");
  fit_polygon->add_option("--summary", summary_out, "Polygon summary JSON");
  fit_polygon->add_option("--svg", svg_out, "Spiral plot SVG");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study; writes the MSE table as CSV");
  simulate->add_option("-c,--config", config_path, "Study config JSON")->required();
  simulate->add_option("-o,--output", csv_out, "MSE table CSV (default stdout)");
  int sim_workers = 0;
  simulate->add_option("--workers", sim_workers, "Override the worker count of the config");

  auto* plot_spiral = app.add_subcommand("plot-spiral", "Spiral plot from a fit-polygon dates CSV");
  std::string dates_path;
  plot_spiral->add_option("-i,--input", dates_path, "Dates CSV")->required();
  plot_spiral->add_option("-o,--output", svg_out, "SVG output (default stdout)");

  auto* plot_profile = app.add_subcommand("plot-profile", "Profile plot of one pixel");
  add_input(plot_profile, in, false);
  add_run_flags(plot_profile, flags);
  plot_profile->add_option("-o,--output", svg_out, "SVG output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (fit_pixel->parsed() || plot_profile->parsed()) {
    const auto config = flags.resolve();
    const auto series = pc::load_pixel_csv(in.input, in.season_len, in.seasons, in.first_year);
    const auto result = pc::fit_pixel(series, config);
    const auto svg = pc::render_profile(result.curves, result.trend, &result.dates);
    if (plot_profile->parsed()) {
      write_text(svg_out, svg);
      return 0;
    }
    auto j = pc::to_json(result);
    j["config"] = pc::to_json(config);
    write_text(json_out, j.dump(2) + "\n");
    if (!csv_out.empty()) write_text(csv_out, pc::dates_csv_header(false) + "\n" + pc::dates_csv_row(result.dates) + "\n");
    if (!svg_out.empty()) write_text(svg_out, svg);
    return 0;
  }

  if (fit_polygon->parsed()) {
    const auto config = flags.resolve();
    const auto pixels = pc::load_polygon_csv(in.input, in.season_len, in.seasons, in.first_year);
    const auto result = pc::fit_polygon(pixels, config);
    for (const auto& p : result.pixels) {
      if (!p.dates) std::cerr << "pixel " << p.id << " excluded: " << p.error << "\n";
    }
    write_text(csv_out, pc::polygon_dates_csv(result.pixels));
    if (!summary_out.empty()) {
      auto j = pc::to_json(result.summary);
      j["config"] = pc::to_json(config);
      write_text(summary_out, j.dump(2) + "\n");
    }
    if (!svg_out.empty()) {
      std::vector<pc::PhenoDates> dates;
      for (const auto& p : result.pixels) {
        if (p.dates) dates.push_back(*p.dates);
      }
      write_text(svg_out, pc::render_spiral(dates));
    }
    return result.summary.failed_pixels == result.summary.total_pixels ? 3 : 0;
  }

  if (simulate->parsed()) {
    auto configs = pc::load_study_config(config_path);
    if (sim_workers > 0) {
      for (auto& c : configs) c.estimator.workers = sim_workers;
    }
    write_text(csv_out, pc::mse_table_csv(pc::run_studies(configs)));
    return 0;
  }

  if (plot_spiral->parsed()) {
    const auto dates = read_dates_csv(dates_path, 365.0);
    write_text(svg_out, pc::render_spiral(dates));
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pc::Error& e) {
    std::cerr << "error [" << pc::to_string(e.kind()) << "]: " << e.what() << "\n";
    return pc::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
