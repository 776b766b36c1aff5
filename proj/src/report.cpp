#include "trimfit/report.hpp"

#include <cmath>

namespace trimfit {

namespace {

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "trimfit-runreport/1";
  j["method"] = method;
  j["config"] = config;
  j["seed"] = seed;
  j["wall_s"] = wall_s;
  j["final_objective"] = final_objective;
  j["final_weights"] = std::vector<double>(final_w.data(), final_w.data() + final_w.size());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : trace) {
    arr.push_back({{"k", t.k},
                   {"delta", t.delta},
                   {"tau", t.tau},
                   {"rho", finite_or_null(t.rho)},
                   {"s1", t.sample_size_primary},
                   {"s2", t.sample_size_secondary},
                   {"accepted", t.accepted},
                   {"generators", t.generators_used},
                   {"wall_s", t.wall_s}});
  }
  j["trace"] = std::move(arr);
  return j;
}

}  // namespace trimfit
