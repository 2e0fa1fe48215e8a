#include "result_json.hpp"

#include "msv/errors.hpp"

namespace msv::cli {
namespace {

nlohmann::json step_json(const StepReport& s) {
  return {{"objective", s.objective},
          {"evaluations", s.evaluations},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"trace", s.trace}};
}

}  // namespace

nlohmann::json to_json(const ErrorReport& report) {
  nlohmann::json j;
  j["edges"] = report.edges;
  auto labels = bucket_labels(report.edges);
  labels.push_back("total");
  for (Underlying u : {Underlying::spx, Underlying::vix}) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t b = 0; b <= report.bucket_count(); ++b) {
      const auto& c = report.cell(u, b);
      rows.push_back({{"bucket", labels[b]}, {"count", c.count}, {"mean", c.mean}, {"std", c.std}});
    }
    j[to_string(u)] = rows;
  }
  return j;
}

nlohmann::json to_json(const CalibrationResult& r) {
  nlohmann::json j;
  j["model"] = r.model;
  if (r.model == "heston") {
    j["parameters"] = {{"kappa", r.heston.kappa}, {"theta", r.heston.theta}, {"sigma", r.heston.sigma},
                       {"rho", r.heston.rho}, {"r", r.heston.r}};
  } else {
    j["parameters"] = {{"kappa", r.params.kappa}, {"theta", r.params.theta}, {"sigma", r.params.sigma},
                       {"rho", r.params.rho}, {"epsilon", r.params.epsilon}, {"w3_eps", r.params.w3_eps},
                       {"r", r.params.r}};
  }
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t i = 0; i < r.dates.size(); ++i) {
    states.push_back({{"date", format_date(r.dates[i])}, {"y", r.states[i].y}, {"z", r.states[i].z},
                      {"feasible", static_cast<bool>(r.feasible[i])}});
  }
  j["states"] = states;
  j["skipped_dates"] = r.skipped_dates;
  j["step1"] = step_json(r.step1);
  j["step2"] = step_json(r.step2);
  j["log"] = r.log;
  if (r.report.cells[0].size() == r.report.bucket_count() + 1) j["error_report"] = to_json(r.report);
  return j;
}

CalibrationResult result_from_json(const nlohmann::json& j) {
  try {
    CalibrationResult r;
    r.model = j.at("model").get<std::string>();
    if (r.model != "heston" && r.model != "msv") throw DataError("unknown model '" + r.model + "' in result file");
    const auto& p = j.at("parameters");
    if (r.model == "heston") {
      r.heston = {p.at("kappa"), p.at("theta"), p.at("sigma"), p.at("rho"), p.at("r")};
    } else {
      r.params = {p.at("kappa"), p.at("theta"), p.at("sigma"), p.at("rho"),
                  p.at("epsilon"), p.at("w3_eps"), p.at("r")};
      r.heston = {r.params.kappa, r.params.theta, r.params.sigma, r.params.rho, r.params.r};
    }
    for (const auto& s : j.at("states")) {
      r.dates.push_back(parse_date(s.at("date").get<std::string>()));
      r.states.push_back({s.at("y").get<double>(), s.at("z").get<double>()});
      r.feasible.push_back(s.at("feasible").get<bool>());
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed result file: ") + e.what());
  }
}

}  // namespace msv::cli
