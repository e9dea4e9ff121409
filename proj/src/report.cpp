#include "ubmat/report.hpp"

#include "ubmat/errors.hpp"

namespace ubmat::io {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from(const Json& j, const char* name) {
  if (!j.is_array()) throw InvalidInput(std::string("\"") + name + "\" must be an array");
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

}  // namespace

Json law_to_json(const FMixture& law) {
  Json terms = Json::array();
  for (const FTerm& t : law.terms) {
    terms.push_back({{"coefficient", t.coefficient},
                     {"df1", t.df1},
                     {"df2", t.df2},
                     {"noncentrality", t.noncentrality}});
  }
  Json out = {{"terms", terms}};
  if (!law.hotelling_lawley.empty()) {
    Json hl = Json::array();
    for (const HotellingLawleyTerm& h : law.hotelling_lawley) {
      hl.push_back({{"coefficient", h.coefficient},
                    {"q", h.q},
                    {"d", h.d},
                    {"nu", h.nu},
                    {"shift", h.shift}});
    }
    out["hotelling_lawley"] = hl;
  }
  return out;
}

Json report_to_json(const TestReport& r) {
  Json out;
  out["test"] = r.test;
  out["statistic"] = r.statistic;
  out["components"] = vector_json(r.components);
  out["p_value"] = r.p_value;
  out["critical_value"] = r.critical_value;
  out["alpha"] = r.alpha;
  out["reject"] = r.reject;
  out["method"] = to_string(r.method);
  if (r.method == Method::monte_carlo) {
    out["replicates"] = r.replicates;
    out["seed"] = r.seed;
    out["p_value_smoothing"] = "(exceed + 1) / (replicates + 1)";
  } else {
    out["replicates"] = nullptr;
    out["seed"] = nullptr;
  }
  if (r.quantile) {
    out["critical_value_bracket"] = {r.quantile->lower, r.quantile->upper};
    out["critical_value_se"] = r.quantile->standard_error;
  }
  if (r.morrison) {
    out["morrison"] = {{"c1", r.morrison->c1}, {"c2", r.morrison->c2}, {"df1", r.morrison->df1}};
  }
  out["n"] = r.n;
  out["groups"] = r.groups;
  out["partition"] = r.partition.sizes();
  out["law"] = law_to_json(r.law);
  return out;
}

Json study_to_json(const StudyResult& s) {
  return {{"rejection_rate", s.rate},
          {"standard_error", s.standard_error},
          {"ci95", {s.ci_low, s.ci_high}},
          {"critical_value", s.critical_value},
          {"replicates", s.replicates},
          {"failures", s.failures}};
}

Json power_to_json(const PowerResult& p) {
  Json out = {{"empirical", study_to_json(p.empirical)},
              {"predicted_power", p.predicted},
              {"predicted_standard_error", p.predicted_standard_error}};
  if (p.noncentrality.size() > 0) out["noncentrality"] = vector_json(p.noncentrality);
  out["alternative_law"] = law_to_json(p.alternative);
  return out;
}

SimulationPlan plan_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InvalidInput("plan must be a JSON object");
    const std::string test = j.value("test", std::string("one_sample"));
    if (!j.contains("sigma")) throw InvalidInput("plan is missing \"sigma\"");
    SimulationPlan plan{.kind = PlanKind::one_sample,
                        .sigma = coordinates_from_json(j.at("sigma"))};
    const Index p = plan.sigma.dim();
    if (test == "one_sample") {
      plan.kind = PlanKind::one_sample;
      if (!j.contains("n")) throw InvalidInput("one-sample plan is missing \"n\"");
      plan.sizes = {j.at("n").get<Index>()};
      plan.means = {j.contains("mu") ? vector_from(j.at("mu"), "mu")
                                     : Eigen::VectorXd::Zero(p)};
      plan.mu0 = j.contains("mu0") ? vector_from(j.at("mu0"), "mu0")
                                   : Eigen::VectorXd::Zero(p);
    } else if (test == "m_sample") {
      plan.kind = PlanKind::m_sample;
      if (!j.contains("group_sizes")) {
        throw InvalidInput("M-sample plan is missing \"group_sizes\"");
      }
      for (const auto& s : j.at("group_sizes")) plan.sizes.push_back(s.get<Index>());
      if (j.contains("group_means")) {
        for (const auto& m : j.at("group_means")) plan.means.push_back(vector_from(m, "group_means"));
      } else {
        plan.means.assign(plan.sizes.size(), Eigen::VectorXd::Zero(p));
      }
    } else {
      throw InvalidInput("plan \"test\" must be one_sample or m_sample");
    }
    plan.replicates = j.value("replicates", plan.replicates);
    plan.seed = j.value("seed", plan.seed);
    plan.alpha = j.value("alpha", plan.alpha);
    plan.law_replicates = j.value("law_replicates", plan.law_replicates);
    plan.method = parse_method(j.value("method", std::string("mc")));
    plan.estimation.allow_small_n = j.value("allow_small_n", false);
    plan.validate();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed plan: ") + e.what());
  }
}

Json plan_to_json(const SimulationPlan& plan) {
  Json out;
  out["test"] = plan.kind == PlanKind::one_sample ? "one_sample" : "m_sample";
  out["sigma"] = coordinates_to_json(plan.sigma);
  if (plan.kind == PlanKind::one_sample) {
    out["mu"] = vector_json(plan.means.front());
    out["mu0"] = vector_json(plan.mu0);
    out["n"] = plan.sizes.front();
  } else {
    Json means = Json::array();
    for (const auto& m : plan.means) means.push_back(vector_json(m));
    out["group_means"] = means;
    out["group_sizes"] = plan.sizes;
  }
  out["replicates"] = plan.replicates;
  out["seed"] = plan.seed;
  out["alpha"] = plan.alpha;
  out["law_replicates"] = plan.law_replicates;
  out["method"] = to_string(plan.method);
  out["allow_small_n"] = plan.estimation.allow_small_n;
  return out;
}

}  // namespace ubmat::io
