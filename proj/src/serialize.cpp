#include "phenocurve/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "phenocurve/errors.hpp"

namespace phenocurve {

using nlohmann::json;

namespace {

std::string join_flags(const PhenoDates& d) {
  std::string out;
  for (const auto& name : d.flag_names()) {
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const PhenoDates& dates) {
  json j;
  j["period"] = dates.period;
  json d = json::object();
  for (Phase p : kPhases) {
    const auto& v = dates[p];
    d[std::string(phase_code(p))] =
        v ? json{{"position", v->position}, {"doy", v->doy}} : json(nullptr);
  }
  j["dates"] = d;
  j["flags"] = dates.flag_names();
  j["ordered"] = !dates.has(DateFlag::OrderingViolated);
  return j;
}

PhenoDates phenodates_from_json(const json& j) {
  try {
    PhenoDates out;
    out.period = j.at("period").get<double>();
    const auto& d = j.at("dates");
    for (Phase p : kPhases) {
      const auto it = d.find(std::string(phase_code(p)));
      if (it == d.end() || it->is_null()) continue;
      out[p] = PhenoDate{it->at("position").get<double>(), it->at("doy").get<int>()};
    }
    for (const auto& name : j.value("flags", std::vector<std::string>{})) {
      if (name == "OrderingViolated") out.set(DateFlag::OrderingViolated);
      else if (name == "SenEqualsMat") out.set(DateFlag::SenEqualsMat);
      else if (name == "MissingGU") out.set(DateFlag::MissingGU);
      else if (name == "MissingDor") out.set(DateFlag::MissingDor);
      else if (name == "MissingSen") out.set(DateFlag::MissingSen);
      else if (name.rfind("SignConditionFailed(", 0) == 0 && name.back() == ')') {
        const auto code = name.substr(20, name.size() - 21);
        const auto p = phase_from_code(code);
        if (!p) throw Error(ErrorKind::MalformedInput, "unknown phase in flag " + name);
        out.sign_failures.push_back(*p);
        out.set(DateFlag::SignConditionFailed);
      } else {
        throw Error(ErrorKind::MalformedInput, "unknown flag " + name);
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, std::string("dates JSON: ") + e.what());
  }
}

json to_json(const FpcaFit& fit) {
  json j;
  j["h"] = fit.h;
  j["lambda_tau"] = fit.lambda_tau;
  j["lambda_psi"] = fit.lambda_psi;
  j["residual_variance"] = fit.residual_variance;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["lambda_tau_fallback"] = fit.lambda_tau_fallback;
  j["lambda_psi_fallback"] = fit.lambda_psi_fallback;
  j["degenerate_init"] = fit.degenerate_init;
  j["score_shrinkage"] = std::vector<double>(fit.score_shrinkage.data(),
                                             fit.score_shrinkage.data() + fit.score_shrinkage.size());
  j["objective_trace"] = fit.objective_trace;
  return j;
}

json to_json(const RunConfig& c) {
  json j;
  j["num_freq"] = c.num_freq;
  j["distance"] = std::string(to_string(c.distance));
  j["h"] = c.h;
  j["samples"] = c.samples;
  j["grid_n"] = c.grid_n;
  j["dense_n"] = c.dense_n;
  j["dominating_threshold"] = c.dominating_threshold ? json(*c.dominating_threshold) : json(nullptr);
  j["trim_z"] = c.trim_z;
  j["mad_scale"] = c.mad_scale;
  j["seed"] = c.seed;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["value_scale"] = c.value_scale;
  j["refit_num_freq"] = c.trend_num_freq();
  return j;
}

json to_json(const PolygonSummary& summary) {
  json j;
  j["total_pixels"] = summary.total_pixels;
  j["failed_pixels"] = summary.failed_pixels;
  json params = json::object();
  for (Phase p : kPhases) {
    const auto& s = summary.parameters[static_cast<std::size_t>(p)];
    params[std::string(phase_code(p))] = {
        {"median_doy", optional_number(s.median_doy)},
        {"mad_days", optional_number(s.mad_days)},
        {"outlier_fraction", s.outlier_fraction},
        {"available", s.available},
        {"pixel_count", s.pixel_count},
    };
  }
  j["parameters"] = params;
  return j;
}

json to_json(const PixelResult& r) {
  json j = to_json(r.dates);
  json clusters;
  clusters["labels"] = r.clusters.labels;
  clusters["dominating"] = r.clusters.dominating ? json(*r.clusters.dominating) : json(nullptr);
  clusters["threshold"] = r.clusters.dominating_threshold;
  std::vector<std::string> used;
  for (std::size_t c : r.used) used.push_back(r.curves.season_labels.at(c));
  clusters["used_seasons"] = used;
  j["clusters"] = clusters;
  j["fpca"] = to_json(r.fpca);
  return j;
}

std::string dates_csv_header(bool with_id) {
  std::string s = with_id ? "id," : "";
  for (Phase p : kPhases) s += std::string(phase_code(p)) + ",";
  s += "flags";
  return s;
}

std::string dates_csv_row(const PhenoDates& dates) {
  std::string s;
  for (Phase p : kPhases) {
    if (const auto& d = dates[p]) s += std::to_string(d->doy);
    s += ",";
  }
  s += join_flags(dates);
  return s;
}

std::string polygon_dates_csv(const std::vector<PixelOutcome>& pixels) {
  std::string s = dates_csv_header(true) + ",error\n";
  for (const auto& p : pixels) {
    s += p.id + ",";
    if (p.dates) {
      s += dates_csv_row(*p.dates) + ",\n";
    } else {
      std::string err = p.error;
      for (char& c : err) {
        if (c == ',' || c == '\n' || c == '"') c = ';';
      }
      s += ",,,,,,," + err + "\n";
    }
  }
  return s;
}

std::string mse_table_csv(const MseTable& table) {
  std::string s =
      "noise,sigma,df,num_freq,distance,GU,SoS,Mat,EoS,reps,failures,excluded_GU,excluded_SoS,"
      "excluded_Mat,excluded_EoS\n";
  for (const auto& r : table.rows) {
    const char* kind = r.noise.kind == NoiseKind::Homoscedastic     ? "homoscedastic"
                       : r.noise.kind == NoiseKind::Heteroscedastic ? "heteroscedastic"
                                                                    : "none";
    s += std::string(kind) + ",";
    s += (r.noise.kind == NoiseKind::Homoscedastic ? fmt(r.noise.sigma) : std::string()) + ",";
    s += (r.noise.kind == NoiseKind::Heteroscedastic ? fmt(r.noise.df) : std::string()) + ",";
    s += std::to_string(r.num_freq) + "," + std::string(to_string(r.distance));
    for (double m : r.mse) s += "," + fmt(m);
    s += "," + std::to_string(r.reps) + "," + std::to_string(r.failures);
    for (int e : r.excluded) s += "," + std::to_string(e);
    s += "\n";
  }
  return s;
}

}  // namespace phenocurve
