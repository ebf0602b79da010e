#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phenocurve/basis.hpp"
#include "phenocurve/clustering.hpp"
#include "phenocurve/dates.hpp"
#include "phenocurve/errors.hpp"
#include "phenocurve/fpca.hpp"
#include "phenocurve/harmonic.hpp"
#include "phenocurve/phenodates.hpp"
#include "phenocurve/pipeline.hpp"
#include "phenocurve/serialize.hpp"
#include "phenocurve/simulation.hpp"
#include "phenocurve/svg.hpp"

namespace py = pybind11;
using namespace phenocurve;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

DtwVariant variant_from(const std::string& name) {
  const auto v = parse_dtw_variant(name);
  if (!v) throw Error(ErrorKind::Contract, "unknown distance '" + name + "'");
  return *v;
}

RunConfig run_config(const py::kwargs& kw) {
  RunConfig c;
  for (const auto& item : kw) {
    const auto key = item.first.cast<std::string>();
    const py::handle v = item.second;
    if (key == "num_freq") c.num_freq = v.cast<int>();
    else if (key == "distance") c.distance = variant_from(v.cast<std::string>());
    else if (key == "h") c.h = v.cast<int>();
    else if (key == "samples") c.samples = v.cast<int>();
    else if (key == "grid_n") c.grid_n = v.cast<int>();
    else if (key == "dense_n") c.dense_n = v.cast<int>();
    else if (key == "dominating_threshold") c.dominating_threshold = v.cast<std::optional<int>>();
    else if (key == "trim_z") c.trim_z = v.cast<double>();
    else if (key == "mad_scale") c.mad_scale = v.cast<double>();
    else if (key == "workers") c.workers = v.cast<int>();
    else if (key == "seed") c.seed = v.cast<std::uint64_t>();
    else if (key == "max_iter") c.max_iter = v.cast<int>();
    else if (key == "tol") c.tol = v.cast<double>();
    else if (key == "value_scale") c.value_scale = v.cast<double>();
    else if (key == "refit_num_freq") c.refit_num_freq = v.cast<std::optional<int>>();
    else throw Error(ErrorKind::Contract, "unknown option '" + key + "'");
  }
  c.validate();
  return c;
}

PixelSeries pixel(const std::vector<double>& values, int season_len, int seasons,
                  const std::optional<std::vector<bool>>& missing, int first_year) {
  PixelSeries s;
  s.grid = ObservationGrid::make(season_len, seasons, first_year);
  s.values = values;
  s.missing = missing.value_or(std::vector<bool>(values.size(), false));
  s.validate();
  return s;
}

py::dict harmonic_dict(const HarmonicModel& m) {
  py::dict d;
  d["intercept"] = m.intercept;
  d["sin"] = m.sin_coefs;
  d["cos"] = m.cos_coefs;
  d["period"] = m.period;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phenological dates from satellite vegetation-index series";

  static py::exception<Error> error_type(m, "PhenocurveError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::module_::import("phenocurve._core").attr("PhenocurveError");
      py::object inst = cls(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      inst.attr("exit_code") = exit_code(e.kind());
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  m.def(
      "fit_harmonic",
      [](const std::vector<double>& y, int num_freq, int season_len) {
        const auto fit = fit_harmonic(y, num_freq, season_len);
        py::dict d = harmonic_dict(fit.model);
        d["residual_sd"] = fit.diagnostics.residual_sd;
        d["rss"] = fit.diagnostics.rss;
        return d;
      },
      py::arg("y"), py::arg("num_freq"), py::arg("season_len"));

  m.def(
      "closed_form_phenodates",
      [](double c0, double c1, double period, double phase_deg) {
        return to_python(to_json(closed_form_phenodates(c0, c1, period, phase_deg)));
      },
      py::arg("c0"), py::arg("c1"), py::arg("period"), py::arg("phase_deg"));

  m.def(
      "phenodates_from_model",
      [](double intercept, const std::vector<double>& sin_coefs, const std::vector<double>& cos_coefs,
         double period, int dense_n) {
        require(sin_coefs.size() == cos_coefs.size(), "phenodates_from_model: sin/cos lengths differ");
        HarmonicModel model{intercept, sin_coefs, cos_coefs, period};
        return to_python(to_json(phenodates_from_model(model, dense_n)));
      },
      py::arg("intercept"), py::arg("sin"), py::arg("cos"), py::arg("period"), py::arg("dense_n") = 3650);

  m.def(
      "dtw_distance",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& distance) {
        return dtw_distance(a, b, variant_from(distance));
      },
      py::arg("a"), py::arg("b"), py::arg("distance") = "dtw_basic");

  m.def(
      "fpca_fit",
      [](const Eigen::MatrixXd& y, double period, int h, int samples, int max_iter, double tol) {
        CurveMatrix curves;
        curves.samples = y;
        curves.period = period;
        const BasisSet basis = build_dr_basis(static_cast<int>(y.rows()), samples);
        const auto fit = fpca_fit(curves, basis, h, max_iter, tol);
        py::dict d = to_python(to_json(fit));
        d["trend"] = Eigen::VectorXd(predict_trend(fit, basis).values);
        d["components"] = predict_components(fit, basis);
        d["scores"] = fit.scores;
        return d;
      },
      py::arg("y"), py::arg("period") = 1.0, py::arg("h") = 1, py::arg("samples") = 50, py::arg("max_iter") = 200,
      py::arg("tol") = 1e-6, "Y has one curve per column on an equally spaced grid of [0, 1].");

  m.def(
      "fit_pixel",
      [](const std::vector<double>& values, int season_len, int seasons,
         const std::optional<std::vector<bool>>& missing, int first_year, const py::kwargs& kw) {
        const auto result = fit_pixel(pixel(values, season_len, seasons, missing, first_year), run_config(kw));
        py::dict d = to_python(to_json(result));
        d["trend"] = Eigen::VectorXd(result.trend.values);
        d["curves"] = result.curves.samples;
        d["season_labels"] = result.curves.season_labels;
        return d;
      },
      py::arg("values"), py::arg("season_len"), py::arg("seasons"), py::arg("missing") = py::none(),
      py::arg("first_year") = 0,
      "Runs the per-pixel pipeline. Keyword options mirror the command-line run flags.");

  m.def(
      "check_ordering",
      [](const std::vector<std::optional<int>>& doys, double period, bool sen_equals_mat) {
        require(doys.size() == 6, "check_ordering: six day-of-year values expected");
        std::array<std::optional<int>, 6> a{};
        std::copy(doys.begin(), doys.end(), a.begin());
        auto d = PhenoDates::from_doy(a, period);
        if (sen_equals_mat) d.set(DateFlag::SenEqualsMat);
        return check_ordering(d).ordered;
      },
      py::arg("doys"), py::arg("period") = 23.0, py::arg("sen_equals_mat") = false);

  m.def(
      "run_study",
      [](const std::string& config_json) {
        const auto configs = parse_study_config(config_json);
        MseTable table;
        {
          py::gil_scoped_release release;
          table = run_studies(configs);
        }
        py::list rows;
        for (const auto& r : table.rows) {
          py::dict d;
          d["num_freq"] = r.num_freq;
          d["distance"] = std::string(to_string(r.distance));
          d["sigma"] = r.noise.sigma;
          py::dict mse;
          for (std::size_t k = 0; k < kScoredPhases.size(); ++k) mse[py::str(std::string(phase_code(kScoredPhases[k])))] = r.mse[k];
          d["mse"] = mse;
          d["reps"] = r.reps;
          d["failures"] = r.failures;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config_json"));

  m.def(
      "render_spiral",
      [](const std::vector<std::vector<std::optional<int>>>& rows, double period) {
        std::vector<PhenoDates> dates;
        for (const auto& row : rows) {
          require(row.size() == 6, "render_spiral: six day-of-year values expected per row");
          std::array<std::optional<int>, 6> a{};
          std::copy(row.begin(), row.end(), a.begin());
          dates.push_back(PhenoDates::from_doy(a, period));
        }
        return render_spiral(dates);
      },
      py::arg("doys"), py::arg("period") = 23.0);
}
