#pragma once

#include "ubmat/inference.hpp"
#include "ubmat/io.hpp"
#include "ubmat/mixture.hpp"
#include "ubmat/simulation.hpp"

namespace ubmat::io {

Json law_to_json(const FMixture& law);
Json report_to_json(const TestReport& r);
Json study_to_json(const StudyResult& s);
Json power_to_json(const PowerResult& p);

/// {"test": "one_sample" | "m_sample", "sigma": {coordinates},
///  "mu": [...] | "group_means": [[...], ...], "mu0": [...],
///  "n": int | "group_sizes": [...], "replicates", "seed", "alpha",
///  "law_replicates", "method", "allow_small_n"}
SimulationPlan plan_from_json(const Json& j);
Json plan_to_json(const SimulationPlan& plan);

}  // namespace ubmat::io
