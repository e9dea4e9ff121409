#include "table.hpp"

#include "ubmat/bench.hpp"
#include "ubmat/errors.hpp"
#include "ubmat/estimation.hpp"
#include "ubmat/inference.hpp"
#include "ubmat/io.hpp"
#include "ubmat/report.hpp"
#include "ubmat/simulation.hpp"
#include "ubmat/ub_matrix.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

namespace {

using namespace ubmat;
using cli::Fields;
using cli::num;
using cli::Table;
using io::Json;

enum ExitCode { ok = 0, rejected = 2, usage = 3, domain = 4, io_failure = 5 };

struct Output {
  bool json = false;
  std::string path;
  std::vector<std::string> tolerance;
};

struct MatrixInput {
  std::string coords;
  std::string dense;
  std::string partition;
};

struct DataInput {
  std::string data;
  std::string partition;
  std::string labels;
  std::string label_column;
  bool header = false;
  bool allow_small_n = false;
};

struct TestArgs {
  std::string mu0;
  double alpha = 0.05;
  std::int64_t replicates = 100000;
  std::uint64_t seed = 1;
  std::string method = "mc";
  int threads = 0;
  bool exit_on_reject = false;
  std::vector<std::string> contrasts;
};

void emit(const Output& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text << std::flush;
  } else {
    io::write_text_atomic(out.path, text);
  }
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

/// Text given inline or, when it names an existing file, read from that file.
std::string inline_or_file(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::string text = io::read_text(arg);
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ',';
  while (!text.empty() && (text.back() == ',' || text.back() == ' ')) text.pop_back();
  return text;
}

Partition partition_arg(const std::string& arg) { return Partition::parse(inline_or_file(arg)); }

Eigen::VectorXd vector_arg(const std::string& arg) { return io::parse_vector(inline_or_file(arg)); }

Tolerances tolerances(const std::vector<std::string>& specs) {
  Tolerances tol;
  for (const std::string& s : specs) {
    const auto eq = s.find('=');
    const std::string key = eq == std::string::npos ? "uniformity" : s.substr(0, eq);
    const std::string value = eq == std::string::npos ? s : s.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw InvalidInput("cannot parse tolerance '" + s + "'");
    }
    if (!(v >= 0.0)) throw InvalidInput("tolerance must be nonnegative: '" + s + "'");
    if (key == "uniformity") {
      tol.uniformity = v;
    } else if (key == "pivot" || key == "singular_pivot") {
      tol.singular_pivot = v;
    } else if (key == "symmetry") {
      tol.symmetry = v;
    } else if (key == "positivity") {
      tol.positivity = v;
    } else {
      throw InvalidInput("unknown tolerance '" + key +
                         "' (expected uniformity, pivot, symmetry or positivity)");
    }
  }
  return tol;
}

template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path + ": " + e.what());
  }
}

UBMatrix load_matrix(const MatrixInput& in, const Tolerances& tol) {
  if (!in.coords.empty()) {
    return with_path(in.coords, [&] { return io::read_coordinates(in.coords, tol); });
  }
  if (in.dense.empty()) throw InvalidInput("give --coords or --dense with --partition");
  if (in.partition.empty()) throw InvalidInput("--dense needs --partition");
  const Partition p = partition_arg(in.partition);
  const DenseMatrix m = with_path(in.dense, [&] { return io::read_dense_csv(in.dense); });
  return compress(m, p, tol);
}

Dataset load_dataset(const DataInput& in) {
  io::DatasetCsvOptions opt;
  opt.header = in.header;
  if (!in.label_column.empty()) opt.label_column = in.label_column;
  const Partition p = partition_arg(in.partition);
  std::optional<std::string> labels_text;
  if (!in.labels.empty()) {
    labels_text = with_path(in.labels, [&] { return io::read_text(in.labels); });
  }
  return with_path(in.data,
                   [&] { return io::parse_dataset_csv(io::read_text(in.data), p, opt, labels_text); });
}

std::string coordinates_table(const UBMatrix& x) {
  std::vector<std::string> header{"block", "p_k", "a_kk"};
  for (Index c = 0; c < x.blocks(); ++c) header.push_back("b_k" + std::to_string(c + 1));
  Table t(header);
  for (Index r = 0; r < x.blocks(); ++r) {
    std::vector<std::string> row{std::to_string(r + 1), std::to_string(x.partition().size(r)),
                                 num(x.a()(r))};
    for (Index c = 0; c < x.blocks(); ++c) row.push_back(num(x.b()(r, c)));
    t.add(row);
  }
  return t.str();
}

std::string coordinates_out(const Output& out, const UBMatrix& x) {
  return out.json ? json_text(io::coordinates_to_json(x)) : coordinates_table(x);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i), 6);
  return s;
}

// ops

std::string op_det(const Output& out, const UBMatrix& x) {
  const double det = determinant(x);
  const LogDeterminant ld = log_determinant(x);
  if (out.json) {
    Json j;
    j["determinant"] = det;
    j["log_abs_determinant"] = std::isfinite(ld.log_abs) ? Json(ld.log_abs) : Json(nullptr);
    j["sign"] = ld.sign;
    return json_text(j);
  }
  Fields f;
  f.add("determinant", num(det, 15));
  f.add("log|det|", num(ld.log_abs, 15));
  f.add("sign", std::to_string(ld.sign));
  return f.str();
}

std::string op_eig(const Output& out, const UBMatrix& x) {
  const auto values = eigenvalues(x);
  Index total = 0;
  for (const auto& v : values) total += v.multiplicity;
  auto source = [](const SpectralValue& v) {
    return v.source == SpectralValue::Source::within_block ? "within_block" : "delta";
  };
  if (out.json) {
    Json list = Json::array();
    for (const auto& v : values) {
      list.push_back({{"value", v.value},
                      {"multiplicity", v.multiplicity},
                      {"source", source(v)},
                      {"index", v.index + 1}});
    }
    return json_text({{"dimension", total}, {"eigenvalues", list}});
  }
  Table t({"value", "multiplicity", "source", "index"});
  for (const auto& v : values) {
    t.add({num(v.value, 12), std::to_string(v.multiplicity), source(v), std::to_string(v.index + 1)});
  }
  return t.str() + "total multiplicity " + std::to_string(total) + "\n";
}

std::string op_canon(const Output& out, const UBMatrix& x, const std::string& gamma_path) {
  const SpectralForm f = canonical_form(x);
  if (!gamma_path.empty()) io::write_text_atomic(gamma_path, io::dense_to_csv(f.gamma()));
  if (out.json) {
    Json xi = Json::array();
    for (Index r = 0; r < f.xi.rows(); ++r) xi.push_back(vector_json(f.xi.row(r).transpose()));
    return json_text({{"partition", x.partition().sizes()},
                      {"within_block", vector_json(f.within_block)},
                      {"delta_values", vector_json(f.delta_values)},
                      {"xi", xi},
                      {"repeated_delta_values", f.repeated_delta_values},
                      {"diagonal", vector_json(f.diagonal())}});
  }
  std::vector<std::string> header{"block", "a_kk (x p_k-1)", "delta value"};
  for (Index c = 0; c < x.blocks(); ++c) header.push_back("xi_" + std::to_string(c + 1));
  Table t(header);
  for (Index k = 0; k < x.blocks(); ++k) {
    std::vector<std::string> row{std::to_string(k + 1), num(f.within_block(k)), num(f.delta_values(k))};
    for (Index c = 0; c < x.blocks(); ++c) row.push_back(num(f.xi(k, c)));
    t.add(row);
  }
  std::string s = t.str();
  if (f.repeated_delta_values) s += "note: Delta has repeated eigenvalues; xi spans the eigenspace\n";
  return s;
}

// estimate and tests

Json diagnostics_json(const PrecisionDiagnostics& d) {
  return {{"min_a", d.min_a}, {"min_delta_eigenvalue", d.min_delta_eigenvalue}};
}

std::string cmd_estimate(const Output& out, const DataInput& in, const std::string& sigma_out) {
  const Dataset d = load_dataset(in);
  EstimationOptions opt;
  opt.allow_small_n = in.allow_small_n;
  const SampleMoments m = sample_moments(d);
  const UBMatrix sigma = estimate_coordinates(m, d.partition(), opt);
  const PrecisionDiagnostics diag = precision_diagnostics(sigma);
  std::optional<UBMatrix> theta;
  if (diag.min_a > 0.0 && diag.min_delta_eigenvalue > 0.0) theta = estimate_precision(sigma);
  if (!sigma_out.empty()) io::write_text_atomic(sigma_out, json_text(io::coordinates_to_json(sigma)));
  if (out.json) {
    Json j;
    j["n"] = d.rows();
    j["groups"] = m.groups;
    j["mean"] = vector_json(m.mean);
    j["sigma"] = io::coordinates_to_json(sigma);
    j["diagnostics"] = diagnostics_json(diag);
    j["precision"] = theta ? io::coordinates_to_json(*theta) : Json(nullptr);
    return json_text(j);
  }
  Fields f;
  f.add("n", std::to_string(d.rows()));
  f.add("groups", std::to_string(m.groups));
  f.add("min a_kk", num(diag.min_a));
  f.add("min eigenvalue of Delta", num(diag.min_delta_eigenvalue));
  f.add("positive definite", theta ? "yes" : "no");
  return f.str() + "\ncovariance coordinates\n" + coordinates_table(sigma) +
         (theta ? "\nprecision coordinates\n" + coordinates_table(*theta) : std::string());
}

TestOptions test_options(const TestArgs& a, const DataInput& in) {
  TestOptions opt;
  opt.alpha = a.alpha;
  opt.method = parse_method(a.method);
  opt.replicates = a.replicates;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.estimation.allow_small_n = in.allow_small_n;
  return opt;
}

std::string report_out(const Output& out, const TestReport& r, const Json& intervals) {
  if (out.json) {
    Json j = io::report_to_json(r);
    if (!intervals.empty()) j["simultaneous_intervals"] = intervals;
    return json_text(j);
  }
  Fields f;
  f.add("test", r.test);
  f.add("n", std::to_string(r.n) + (r.groups > 1 ? " in " + std::to_string(r.groups) + " groups" : ""));
  f.add("partition", r.partition.to_string());
  f.add("statistic", num(r.statistic, 12));
  for (Index i = 0; i < r.components.size(); ++i) {
    f.add("  F_" + std::to_string(i + 1), num(r.components(i), 12));
  }
  f.add("p-value", num(r.p_value, 6));
  std::string how = to_string(r.method);
  if (r.method == Method::monte_carlo) {
    how += ", " + std::to_string(r.replicates) + " replicates, seed " + std::to_string(r.seed);
  } else if (r.morrison) {
    how += ", C1 = " + num(r.morrison->c1, 6) + ", C2 = " + num(r.morrison->c2, 6);
  }
  f.add("critical value", num(r.critical_value, 8) + " (alpha " + num(r.alpha, 4) + ", " + how + ")");
  f.add("decision", r.reject ? "reject H0" : "do not reject H0");
  std::string s = f.str();
  for (const auto& ci : intervals) {
    s += "interval " + ci["contrast"].dump() + ": [" + num(ci["low"].get<double>(), 8) + ", " +
         num(ci["high"].get<double>(), 8) + "]\n";
  }
  return s;
}

int finish(const Output& out, const TestReport& r, const Json& intervals, bool exit_on_reject) {
  emit(out, report_out(out, r, intervals));
  return exit_on_reject && r.reject ? rejected : ok;
}

int cmd_test1(const Output& out, const DataInput& in, const TestArgs& a) {
  const Dataset d = load_dataset(in);
  if (a.mu0.empty()) throw InvalidInput("--mu0 is required");
  const Eigen::VectorXd mu0 = vector_arg(a.mu0);
  const TestOptions opt = test_options(a, in);
  const TestReport r = one_sample_test(d, mu0, opt);
  Json intervals = Json::array();
  if (!a.contrasts.empty()) {
    const FittedModel fit = fit_model(d, opt.estimation);
    for (const std::string& c : a.contrasts) {
      const Eigen::VectorXd v = vector_arg(c);
      const ConfidenceInterval ci = simultaneous_ci(fit, v, r.critical_value);
      intervals.push_back({{"contrast", vector_json(v)},
                           {"low", ci.low},
                           {"high", ci.high},
                           {"center", ci.center},
                           {"half_width", ci.half_width}});
    }
  }
  return finish(out, r, intervals, a.exit_on_reject);
}

int cmd_testm(const Output& out, const DataInput& in, const TestArgs& a) {
  if (in.labels.empty() && in.label_column.empty()) {
    throw InvalidInput("testm needs group labels: --labels FILE or --label-column NAME");
  }
  const Dataset d = load_dataset(in);
  const TestReport r = m_sample_test(d, test_options(a, in));
  return finish(out, r, Json::array(), a.exit_on_reject);
}

// simulate

struct SimulateArgs {
  std::string plan;
  bool power = false;
  std::string statistics_csv;
};

std::string statistics_csv(const StudyResult& s) {
  std::string out = "replicate,statistic\n";
  for (std::size_t i = 0; i < s.statistics.size(); ++i) {
    out += std::to_string(i) + "," + (std::isnan(s.statistics[i]) ? "nan" : num(s.statistics[i], 17)) + "\n";
  }
  return out;
}

bool plan_is_null(const SimulationPlan& plan) {
  if (plan.kind == PlanKind::one_sample) return plan.means.at(0) == plan.mu0;
  for (const auto& m : plan.means)
    if (m != plan.means.front()) return false;
  return true;
}

std::string study_fields(const StudyResult& s) {
  Fields f;
  f.add("rejection rate", num(s.rate, 6) + " (SE " + num(s.standard_error, 3) + ")");
  f.add("95% interval", "[" + num(s.ci_low, 6) + ", " + num(s.ci_high, 6) + "]");
  f.add("critical value", num(s.critical_value, 8));
  f.add("replicates", std::to_string(s.replicates));
  f.add("failures", std::to_string(s.failures));
  return f.str();
}

int cmd_simulate(const Output& out, const SimulateArgs& a, CLI::App& sub, const TestArgs& t,
                 std::int64_t law_replicates) {
  SimulationPlan plan =
      with_path(a.plan, [&] { return io::plan_from_json(io::parse_json(io::read_text(a.plan))); });
  if (sub.count("--replicates")) plan.replicates = t.replicates;
  if (sub.count("--seed")) plan.seed = t.seed;
  if (sub.count("--alpha")) plan.alpha = t.alpha;
  if (sub.count("--method")) plan.method = parse_method(t.method);
  if (sub.count("--law-replicates")) plan.law_replicates = law_replicates;
  plan.threads = t.threads;
  plan.validate();
  const bool null = plan_is_null(plan);

  Json j;
  j["plan"] = io::plan_to_json(plan);
  j["null"] = null;
  std::string human;
  const StudyResult* study = nullptr;
  std::optional<PowerResult> power;
  std::optional<StudyResult> plain;
  if (a.power) {
    power = run_power_study(plan);
    study = &power->empirical;
    j["power"] = io::power_to_json(*power);
    human = study_fields(*study);
    Fields f;
    f.add("predicted power", num(power->predicted, 6) + " (SE " + num(power->predicted_standard_error, 3) + ")");
    if (power->noncentrality.size() > 0) f.add("noncentrality", join(power->noncentrality));
    human += f.str();
  } else {
    plain = null ? run_type1_study(plan) : run_rejection_study(plan);
    study = &*plain;
    j["study"] = io::study_to_json(*plain);
    human = study_fields(*plain);
  }
  if (!a.statistics_csv.empty()) io::write_text_atomic(a.statistics_csv, statistics_csv(*study));
  emit(out, out.json ? json_text(j) : human);
  return ok;
}

// bench

struct BenchArgs {
  std::vector<std::string> presets;
  std::vector<Index> p;
  std::vector<Index> k;
  std::vector<std::string> ops{"det", "inv", "det+inv", "eig", "mul"};
  int repeats = 21;
  int dense_repeats = 3;
  Index dense_limit = 1024;
};

int cmd_bench(const Output& out, const BenchArgs& a) {
  std::vector<bench::Preset> cases;
  for (const std::string& name : a.presets) cases.push_back(bench::preset(name));
  if (!a.p.empty() || !a.k.empty()) {
    if (a.p.empty() || a.k.empty()) throw InvalidInput("--p and --k must be given together");
    for (Index p : a.p)
      for (Index k : a.k) {
        cases.push_back({"p" + std::to_string(p) + "_k" + std::to_string(k), bench::balanced_partition(p, k)});
      }
  }
  if (cases.empty()) cases = {bench::preset("proteomics"), bench::preset("imaging")};
  std::vector<bench::Op> ops;
  for (const std::string& o : a.ops) ops.push_back(bench::parse_op(o));
  bench::Options opt;
  opt.repeats = a.repeats;
  opt.dense_repeats = a.dense_repeats;
  opt.dense_limit = a.dense_limit;

  Json rows = Json::array();
  Table t({"case", "p", "K", "op", "coordinate s", "dense s", "speedup"});
  for (const auto& c : cases) {
    for (bench::Op op : ops) {
      const bench::Row r = bench::run(c.name, c.partition, op, opt);
      rows.push_back({{"name", r.name},
                      {"p", r.p},
                      {"k", r.k},
                      {"op", bench::to_string(r.op)},
                      {"repeats", r.repeats},
                      {"coordinate_seconds", r.coordinate_seconds},
                      {"dense_seconds", r.dense_seconds ? Json(*r.dense_seconds) : Json(nullptr)},
                      {"speedup", r.speedup ? Json(*r.speedup) : Json(nullptr)}});
      t.add({r.name, std::to_string(r.p), std::to_string(r.k), bench::to_string(r.op),
             num(r.coordinate_seconds, 3), r.dense_seconds ? num(*r.dense_seconds, 3) : "-",
             r.speedup ? num(*r.speedup, 3) : "-"});
    }
  }
  emit(out, out.json ? json_text({{"rows", rows}}) : t.str());
  return ok;
}

void add_output(CLI::App* app, Output& out) {
  app->add_flag("--json", out.json, "Write JSON instead of a table");
  app->add_option("--output,-o", out.path, "Write to this file (atomically) instead of stdout");
}

void add_tolerance(CLI::App* app, Output& out) {
  app->add_option("--tolerance", out.tolerance,
                  "Tolerance override: VALUE (uniformity) or NAME=VALUE with NAME in "
                  "uniformity, pivot, symmetry, positivity");
}

void add_matrix_input(CLI::App* app, MatrixInput& in) {
  auto* coords = app->add_option("--coords", in.coords, "Coordinate JSON file");
  auto* dense = app->add_option("--dense", in.dense, "Dense matrix CSV file");
  coords->excludes(dense);
  app->add_option("--partition", in.partition, "Block sizes, inline (2,3,4) or a file");
}

void add_data_input(CLI::App* app, DataInput& in) {
  app->add_option("--data", in.data, "Observations CSV, one row per subject")->required();
  app->add_option("--partition", in.partition, "Block sizes, inline (2,3,4) or a file")->required();
  auto* labels = app->add_option("--labels", in.labels, "File with one group label (1..M) per row");
  auto* column = app->add_option("--label-column", in.label_column, "Label column: header name or 1-based index");
  labels->excludes(column);
  app->add_flag("--header", in.header, "The data CSV starts with a header row");
  app->add_flag("--allow-small-n", in.allow_small_n, "Skip the n > K + K(K+1)/2 check");
}

void add_test_args(CLI::App* app, TestArgs& a, bool constrain = true) {
  auto* alpha = app->add_option("--alpha", a.alpha, "Significance level");
  auto* reps = app->add_option("--replicates", a.replicates, "Monte Carlo replicates");
  app->add_option("--seed", a.seed, "Random seed");
  auto* method = app->add_option("--method", a.method, "Critical value method: mc or morrison");
  app->add_option("--threads", a.threads, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
  if (constrain) {
    alpha->check(CLI::Range(0.0, 1.0));
    reps->check(CLI::PositiveNumber);
  }
  method->check(CLI::IsMember({"mc", "morrison"}));
}

int error_exit(const std::string& kind, const std::exception& e, int code) {
  std::cerr << "ubmat: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform-block covariance toolkit: coordinate algebra, estimation, mean tests "
               "and simulation studies"};
  app.set_version_flag("--version", "ubmat 0.1.0");
  app.require_subcommand(1);

  Output out;
  MatrixInput matrix;
  DataInput data;
  TestArgs test;
  SimulateArgs sim;
  BenchArgs bench_args;
  int exponent = 2;
  std::string gamma_path;
  std::string sigma_out;
  std::int64_t law_replicates = 200000;
  std::function<int()> action;

  auto* ops = app.add_subcommand("ops", "Operations on one uniform-block matrix");
  ops->require_subcommand(1);
  auto ub_op = [&](const std::string& name, const std::string& help,
                   std::function<std::string(const UBMatrix&)> run) {
    auto* sub = ops->add_subcommand(name, help);
    add_matrix_input(sub, matrix);
    add_output(sub, out);
    add_tolerance(sub, out);
    sub->callback([&, run] {
      action = [&, run] {
        emit(out, run(load_matrix(matrix, tolerances(out.tolerance))));
        return static_cast<int>(ok);
      };
    });
    return sub;
  };
  ub_op("det", "Determinant", [&](const UBMatrix& x) { return op_det(out, x); });
  ub_op("inv", "Inverse coordinates", [&](const UBMatrix& x) {
    return coordinates_out(out, inverse(x, tolerances(out.tolerance)));
  });
  ub_op("eig", "Eigenvalues with multiplicities", [&](const UBMatrix& x) { return op_eig(out, x); });
  ub_op("power", "Integer power coordinates", [&](const UBMatrix& x) {
    return coordinates_out(out, power(x, exponent));
  })->add_option("--exponent,-m", exponent, "Exponent m >= 1")->check(CLI::PositiveNumber);
  ub_op("canon", "Canonical form: eigenvalues in Gamma order and xi vectors",
        [&](const UBMatrix& x) { return op_canon(out, x, gamma_path); })
      ->add_option("--gamma", gamma_path, "Also write the dense orthogonal matrix Gamma as CSV");
  ub_op("corr", "Correlation coordinates", [&](const UBMatrix& x) {
    return coordinates_out(out, correlation_coordinates(x));
  });
  ub_op("precision", "Precision (inverse covariance) coordinates", [&](const UBMatrix& x) {
    return coordinates_out(out, precision_coordinates(x, tolerances(out.tolerance)));
  });
  ub_op("expand", "Dense matrix as CSV", [&](const UBMatrix& x) { return io::dense_to_csv(expand(x)); });
  ub_op("compress", "Coordinates of a dense uniform-block matrix",
        [&](const UBMatrix& x) { return coordinates_out(out, x); });

  auto* estimate = app.add_subcommand("estimate", "Unbiased covariance coordinates from data");
  add_data_input(estimate, data);
  add_output(estimate, out);
  estimate->add_option("--sigma-out", sigma_out, "Also write the covariance coordinates JSON here");
  estimate->callback([&] {
    action = [&] {
      emit(out, cmd_estimate(out, data, sigma_out));
      return static_cast<int>(ok);
    };
  });

  auto* test1 = app.add_subcommand("test1", "One-sample mean test H0: mu = mu0");
  add_data_input(test1, data);
  add_test_args(test1, test);
  add_output(test1, out);
  test1->add_option("--mu0", test.mu0, "Hypothesized mean, inline (comma separated) or a file")->required();
  test1->add_option("--ci", test.contrasts, "Simultaneous interval for the contrast a^T mu (repeatable)");
  test1->add_flag("--exit-code-on-reject", test.exit_on_reject, "Exit with status 2 when H0 is rejected");
  test1->callback([&] { action = [&] { return cmd_test1(out, data, test); }; });

  auto* testm = app.add_subcommand("testm", "M-sample test of equal group means");
  add_data_input(testm, data);
  add_test_args(testm, test);
  add_output(testm, out);
  testm->add_flag("--exit-code-on-reject", test.exit_on_reject, "Exit with status 2 when H0 is rejected");
  testm->callback([&] { action = [&] { return cmd_testm(out, data, test); }; });

  auto* simulate = app.add_subcommand("simulate", "Rejection-rate or power study from a plan file");
  simulate->add_option("--plan", sim.plan, "Simulation plan JSON")->required();
  add_test_args(simulate, test);
  simulate->add_option("--law-replicates", law_replicates, "Draws for the critical value and power prediction")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--power", sim.power, "Also predict power from the noncentral law");
  simulate->add_option("--statistics-csv", sim.statistics_csv, "Write per-replicate statistics as CSV");
  add_output(simulate, out);
  simulate->callback([&] {
    action = [&] { return cmd_simulate(out, sim, *simulate, test, law_replicates); };
  });

  auto* bench_cmd = app.add_subcommand("bench", "Coordinate versus dense timings");
  bench_cmd->add_option("--preset", bench_args.presets, "proteomics, imaging or large (repeatable)")
      ->check(CLI::IsMember({"proteomics", "imaging", "large"}));
  bench_cmd->add_option("--p", bench_args.p, "Dimensions for a grid")->delimiter(',');
  bench_cmd->add_option("--k", bench_args.k, "Block counts for a grid")->delimiter(',');
  bench_cmd->add_option("--ops", bench_args.ops, "det, inv, det+inv, eig, mul")
      ->delimiter(',')
      ->check(CLI::IsMember({"det", "inv", "det+inv", "eig", "mul"}));
  bench_cmd->add_option("--repeats", bench_args.repeats, "Coordinate-path repeats")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dense-repeats", bench_args.dense_repeats, "Dense-path repeats")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dense-limit", bench_args.dense_limit, "Skip dense timings above this p");
  add_output(bench_cmd, out);
  bench_cmd->callback([&] { action = [&] { return cmd_bench(out, bench_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    return action ? action() : static_cast<int>(usage);
  } catch (const ParseError& e) {
    return error_exit("parse error", e, usage);
  } catch (const StructureError& e) {
    return error_exit("not uniform-block", e, usage);
  } catch (const InvalidInput& e) {
    return error_exit("invalid input", e, usage);
  } catch (const SingularError& e) {
    return error_exit("singular matrix", e, domain);
  } catch (const DomainError& e) {
    return error_exit("error", e, domain);
  } catch (const std::system_error& e) {
    return error_exit("i/o error", e, io_failure);
  } catch (const std::exception& e) {
    return error_exit("error", e, domain);
  }
}
