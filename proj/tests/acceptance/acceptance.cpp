#include "ubmat/bench.hpp"
#include "ubmat/errors.hpp"
#include "ubmat/estimation.hpp"
#include "ubmat/inference.hpp"
#include "ubmat/io.hpp"
#include "ubmat/mixture.hpp"
#include "ubmat/oracle.hpp"
#include "ubmat/parallel.hpp"
#include "ubmat/report.hpp"
#include "ubmat/simulation.hpp"
#include "ubmat/ub_matrix.hpp"

#include "instances.hpp"

#include <CLI11.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ubmat;
using support::InstanceGenerator;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double dense_error(const DenseMatrix& x, const DenseMatrix& y) {
  return support::max_abs(oracle::subtract(x, y));
}

DenseMatrix dense_power(const DenseMatrix& x, int m) {
  DenseMatrix out = x;
  for (int i = 1; i < m; ++i) out = oracle::matmul(out, x);
  return out;
}

DenseMatrix dense_correlation(const DenseMatrix& x) {
  DenseMatrix out = x;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) / std::sqrt(x(i, i) * x(j, j));
  return out;
}

/// Fixed covariance used by the statistical criteria.
UBMatrix study_sigma() {
  Eigen::VectorXd a(2);
  a << 1.0, 1.5;
  Eigen::MatrixXd b(2, 2);
  b << 0.6, 0.25, 0.25, 0.4;
  return UBMatrix(a, b, Partition({3, 4}));
}

SimulationPlan null_one_sample(Index n, std::int64_t reps, std::uint64_t seed, int threads) {
  SimulationPlan plan{.kind = PlanKind::one_sample, .sigma = study_sigma()};
  plan.means = {Eigen::VectorXd::Zero(7)};
  plan.mu0 = Eigen::VectorXd::Zero(7);
  plan.sizes = {n};
  plan.replicates = reps;
  plan.seed = seed;
  plan.threads = threads;
  return plan;
}

Outcome criterion_equivalence() {
  const auto t0 = Clock::now();
  InstanceGenerator gen(20240101);
  const int instances = 240;
  const double tol = 1e-9;
  double worst = 0.0;
  std::string worst_op = "none";
  auto record = [&](const char* op, double err) {
    if (!(err <= worst) || std::isnan(err)) {
      worst = std::isnan(err) ? INFINITY : err;
      worst_op = op;
    }
  };
  for (int t = 0; t < instances; ++t) {
    const Partition p = gen.partition(1, 6, 2, 8);
    const UBMatrix x = gen.spd(p);
    const UBMatrix y = gen.symmetric(p);
    const DenseMatrix dx = expand(x);
    const DenseMatrix dy = expand(y);
    record("add", dense_error(expand(add(x, y)), oracle::add(dx, dy)));
    record("subtract", dense_error(expand(subtract(x, y)), oracle::subtract(dx, dy)));
    record("product", dense_error(expand(multiply(x, y)), oracle::matmul(dx, dy)));
    record("square", dense_error(expand(multiply(x, x)), oracle::matmul(dx, dx)));
    for (int m = 1; m <= 4; ++m) record("power", dense_error(expand(power(x, m)), dense_power(dx, m)));
    record("inverse", dense_error(expand(inverse(x)), oracle::inverse(dx)));
    const double dd = oracle::determinant(dx);
    record("determinant", std::abs(determinant(x) - dd) / std::max(1.0, std::abs(dd)));
    const Eigen::VectorXd ev = eigenvalue_list(x);
    const auto oracle_ev = support::sorted_desc(oracle::symmetric_eigen(dx).values);
    double ev_err = 0.0;
    for (std::size_t i = 0; i < oracle_ev.size(); ++i)
      ev_err = std::max(ev_err, std::abs(ev(static_cast<Index>(i)) - oracle_ev[i]));
    record("eigenvalues", ev_err);
    const SpectralForm f = canonical_form(x);
    const DenseMatrix g = f.gamma();
    const DenseMatrix diag = oracle::matmul(oracle::matmul(g, dx), oracle::transpose(g));
    const Eigen::VectorXd lambda = f.diagonal();
    DenseMatrix target(p.dim(), p.dim());
    for (Index i = 0; i < p.dim(); ++i) target(i, i) = lambda(i);
    record("canonical", dense_error(diag, target));
    record("canonical-orthogonality",
           dense_error(oracle::matmul(g, oracle::transpose(g)), support::dense_identity(p.dim())));
    record("precision", dense_error(expand(precision_coordinates(x)), oracle::inverse(dx)));
    record("correlation", dense_error(expand(correlation_coordinates(x)), dense_correlation(dx)));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= tol && elapsed < 60.0,
          fmt("%d instances, worst error %.2e (%s) <= %.0e, %.1f s < 60 s", instances, worst,
              worst_op.c_str(), tol, elapsed)};
}

Outcome criterion_worked_instance() {
  const UBMatrix x = support::worked_instance();
  const DenseMatrix d = expand(x);
  const double golden_det = 22.24;
  const std::vector<double> golden_spec{3.1152, 2.0, 2.0, 1.7848, 1.0};
  const double inv_a[2] = {1.0, 0.5};
  const double inv_b[2][2] = {{-0.23921, -0.03597}, {-0.03597, -0.04676}};
  const double spec_tol = 5e-5;
  const double coord_tol = 5e-6;

  // Oracle first, then the coordinate path, both against the same goldens.
  const double dense_det = oracle::determinant(d);
  const auto dense_spec = support::sorted_desc(oracle::symmetric_eigen(d).values);
  const UBMatrix dense_inv = compress(oracle::inverse(d), x.partition());
  const UBMatrix coord_inv = inverse(x);
  const Eigen::VectorXd coord_spec = eigenvalue_list(x);

  bool ok = std::abs(dense_det - golden_det) <= 1e-12 && std::abs(determinant(x) - golden_det) <= 1e-12;
  double spec_err = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    spec_err = std::max(spec_err, std::abs(dense_spec[i] - golden_spec[i]));
    spec_err = std::max(spec_err, std::abs(coord_spec(static_cast<Index>(i)) - golden_spec[i]));
  }
  ok = ok && spec_err <= spec_tol;
  double coord_err = 0.0;
  for (const UBMatrix* inv : {&dense_inv, &coord_inv})
    for (Index r = 0; r < 2; ++r) {
      coord_err = std::max(coord_err, std::abs(inv->a()(r) - inv_a[r]));
      for (Index c = 0; c < 2; ++c) coord_err = std::max(coord_err, std::abs(inv->b()(r, c) - inv_b[r][c]));
    }
  ok = ok && coord_err <= coord_tol;
  return {ok, fmt("det %.12g (oracle %.12g), spectrum error %.1e <= %.0e, inverse error %.1e <= %.0e",
                  determinant(x), dense_det, spec_err, spec_tol, coord_err, coord_tol)};
}

Outcome criterion_decomposition() {
  InstanceGenerator gen(77);
  const double tol_u = 1e-10;
  const double tol_identity = 1e-11;
  double worst_u = 0.0;
  int inputs = 0;
  for (int t = 0; t < 100; ++t) {
    const UBMatrix sigma = gen.spd(gen.partition(1, 5, 2, 6));
    const Eigen::VectorXd mu = gen.vector(sigma.dim(), -0.5, 0.5);
    const Dataset d = sample_ub_normal(sigma, mu, 40 + t, 500 + static_cast<std::uint64_t>(t));
    const Statistic s = one_sample_statistic(d, gen.vector(sigma.dim(), -0.5, 0.5));
    worst_u = std::max(worst_u, std::abs(s.value - s.components.sum()) / std::max(1.0, s.value));
    ++inputs;
    const Dataset g = sample_ub_normal_groups(
        sigma, {mu, gen.vector(sigma.dim()), gen.vector(sigma.dim())}, {30, 25 + t % 7, 35}, 900 + static_cast<std::uint64_t>(t));
    const Statistic sm = m_sample_statistic(g);
    worst_u = std::max(worst_u, std::abs(sm.value - sm.components.sum()) / std::max(1.0, sm.value));
    ++inputs;
  }
  double worst_identity = 0.0;
  for (int t = 0; t < 100; ++t) {
    const UBMatrix x = gen.spd(gen.partition());
    const Eigen::MatrixXd a = x.a().asDiagonal();
    const Eigen::MatrixXd p = x.partition().sizes_vector().asDiagonal();
    const Eigen::MatrixXd delta = x.delta();
    const Eigen::MatrixXd lhs = (a * p).inverse() - delta.inverse() * x.b() * a.inverse();
    const Eigen::MatrixXd rhs = (p * delta).inverse();
    worst_identity = std::max(worst_identity, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return {worst_u <= tol_u && worst_identity <= tol_identity,
          fmt("|U - sum F_k| / max(1, U) worst %.1e <= %.0e over %d inputs; "
              "inverse identity worst %.1e <= %.0e over 100 triples",
              worst_u, tol_u, inputs, worst_identity, tol_identity)};
}

Outcome rate_in_band(const StudyResult& r, double lo, double hi, double elapsed) {
  return {r.rate >= lo && r.rate <= hi && r.failures == 0,
          fmt("rate %.4f in [%.3f, %.3f] (SE %.4f, critical value %.4f, %lld replicates, "
              "%lld failures, %.1f s)",
              r.rate, lo, hi, r.standard_error, r.critical_value,
              static_cast<long long>(r.replicates), static_cast<long long>(r.failures), elapsed)};
}

Outcome criterion_one_sample_null() {
  const auto t0 = Clock::now();
  const StudyResult r = run_type1_study(null_one_sample(50, 20000, 4001, 0));
  return rate_in_band(r, 0.044, 0.056, seconds_since(t0));
}

Outcome criterion_m_sample_null() {
  const auto t0 = Clock::now();
  SimulationPlan plan{.kind = PlanKind::m_sample, .sigma = study_sigma()};
  const Eigen::VectorXd common = Eigen::VectorXd::LinSpaced(7, -1.0, 1.0);
  plan.means = {common, common, common};
  plan.sizes = {40, 40, 40};
  plan.replicates = 20000;
  plan.seed = 5001;
  const StudyResult r = run_type1_study(plan);
  return rate_in_band(r, 0.044, 0.056, seconds_since(t0));
}

Outcome criterion_asymptotic() {
  const auto t0 = Clock::now();
  SimulationPlan plan = null_one_sample(2000, 20000, 6001, 0);
  plan.law_replicates = 1000;
  const StudyResult r = run_rejection_study(plan);
  const EmpiricalDistribution u(r.statistics);
  const double se = std::sqrt(u.variance() / static_cast<double>(u.size()));
  const double p = 7.0;
  return {std::abs(u.mean() - p) <= 3.0 * se,
          fmt("mean U %.4f, |mean - 7| = %.4f <= 3 SE = %.4f (%zu replicates, %.1f s)", u.mean(),
              std::abs(u.mean() - p), 3.0 * se, u.size(), seconds_since(t0))};
}

Outcome criterion_estimators() {
  InstanceGenerator gen(88);
  double recovery = 0.0;
  const double recovery_tol = 1e-13;
  for (int t = 0; t < 50; ++t) {
    const UBMatrix x = gen.spd(gen.partition());
    const UBMatrix est = block_average_coordinates(support::to_eigen(expand(x)), x.partition());
    const double scale = std::max(x.a().cwiseAbs().maxCoeff(), x.b().cwiseAbs().maxCoeff());
    recovery = std::max(recovery, (est.a() - x.a()).cwiseAbs().maxCoeff() / scale);
    recovery = std::max(recovery, (est.b() - x.b()).cwiseAbs().maxCoeff() / scale);
  }

  const UBMatrix sigma = study_sigma();
  const int reps = 5000;
  const Index n = 100;
  const Index k = sigma.blocks();
  std::vector<UBMatrix> estimates(static_cast<std::size_t>(reps), sigma);
  parallel_for(reps, 0, [&](std::int64_t r) {
    const Dataset d = sample_ub_normal(sigma, Eigen::VectorXd::Zero(sigma.dim()), n, 7001,
                                       static_cast<std::uint64_t>(r));
    EstimationOptions opt;
    opt.allow_small_n = true;
    estimates[static_cast<std::size_t>(r)] = estimate_coordinates(sample_moments(d), sigma.partition(), opt);
  });
  double worst_z = 0.0;
  int coords = 0;
  auto check = [&](auto get, double truth) {
    double s = 0.0;
    double s2 = 0.0;
    for (const UBMatrix& e : estimates) {
      s += get(e);
      s2 += get(e) * get(e);
    }
    const double mean = s / reps;
    const double se = std::sqrt((s2 / reps - mean * mean) / (reps - 1.0));
    worst_z = std::max(worst_z, std::abs(mean - truth) / se);
    ++coords;
  };
  for (Index i = 0; i < k; ++i) {
    check([i](const UBMatrix& e) { return e.a()(i); }, sigma.a()(i));
    for (Index j = i; j < k; ++j) check([i, j](const UBMatrix& e) { return e.b()(i, j); }, sigma.b()(i, j));
  }
  return {recovery <= recovery_tol && worst_z <= 3.0,
          fmt("exact recovery relative error %.1e <= %.0e; unbiasedness worst |z| %.2f <= 3 "
              "over %d coordinates (%d replicates, n = %td)",
              recovery, recovery_tol, worst_z, coords, reps, n)};
}

Outcome criterion_morrison() {
  const FMixture law = one_sample_null_law(Partition({3, 4}), 50);
  const MorrisonFit fit = morrison_approximation(law);
  const double mean = mixture_mean(law);
  const double var = mixture_variance(law);
  const double moment_err =
      std::max(std::abs(fit.mean() - mean) / mean, std::abs(fit.variance() - var) / var);
  const double approx = fit.upper_quantile(0.05);
  const QuantileEstimate mc = mixture_quantile(law, 0.05, 500000, 8001);
  const double rel = std::abs(approx - mc.value) / mc.value;
  return {moment_err <= 1e-10 && rel <= 0.05,
          fmt("moment relative error %.1e <= 1e-10; C1 F(%.0f, %.3f) quantile %.4f vs MC %.4f, "
              "relative %.4f <= 0.05",
              moment_err, fit.df1, fit.c2, approx, mc.value, rel)};
}

Outcome criterion_power() {
  const auto t0 = Clock::now();
  SimulationPlan plan = null_one_sample(60, 10000, 9001, 0);
  Eigen::VectorXd mu(7);
  mu << 0.25, 0.25, 0.25, 0.05, 0.05, 0.05, 0.05;
  mu(0) += 0.15;
  plan.means = {mu};
  const PowerResult p = run_power_study(plan);
  const double se = std::hypot(p.empirical.standard_error, p.predicted_standard_error);
  const double gap = std::abs(p.empirical.rate - p.predicted);
  const double delta_last = p.noncentrality(p.noncentrality.size() - 1);
  return {delta_last > 0.0 && gap <= 3.0 * se,
          fmt("delta_{K+1} = %.3f; empirical %.4f vs predicted %.4f, gap %.4f <= 3 SE = %.4f (%.1f s)",
              delta_last, p.empirical.rate, p.predicted, gap, 3.0 * se, seconds_since(t0))};
}

Outcome criterion_performance() {
  bench::Options large;
  large.repeats = 21;
  large.dense_repeats = 1;
  const bench::Row row = bench::run("large", bench::balanced_partition(1024, 8), bench::Op::det_inv, large);
  const double speedup = row.speedup.value_or(0.0);
  bool ok = speedup >= 1000.0;
  std::ostringstream detail;
  detail << fmt("p = 1024, K = 8 det+inv speedup %.3g >= 1000 (coordinate %.2e s, dense %.2e s)",
                speedup, row.coordinate_seconds, row.dense_seconds.value_or(0.0));
  bench::Options presets;
  presets.dense_limit = 0;
  for (const std::string& name : {"proteomics", "imaging"}) {
    const bench::Preset pr = bench::preset(name);
    double slowest = 0.0;
    for (bench::Op op : {bench::Op::det, bench::Op::inv, bench::Op::eig, bench::Op::mul}) {
      slowest = std::max(slowest, bench::run(name, pr.partition, op, presets).coordinate_seconds);
    }
    ok = ok && slowest < 1e-3;
    detail << fmt("; %s (K = %td, p = %td) slowest op %.2e s < 1e-3", name.c_str(),
                  pr.partition.blocks(), pr.partition.dim(), slowest);
  }
  return {ok, detail.str()};
}

bool same_bits(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

std::string run_capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  status = pclose(pipe);
  return out;
}

Outcome criterion_determinism(const std::string& cli) {
  const int many = std::max(4, resolve_threads(0));
  std::vector<std::string> checks;
  bool ok = true;
  auto expect = [&](bool same, const std::string& what) {
    ok = ok && same;
    checks.push_back(what + (same ? " identical" : " DIFFER"));
  };

  const UBMatrix sigma = study_sigma();
  const Dataset d1 = sample_ub_normal(sigma, Eigen::VectorXd::Zero(7), 200, 11);
  const Dataset d2 = sample_ub_normal(sigma, Eigen::VectorXd::Zero(7), 200, 11);
  expect(d1.observations() == d2.observations(), "datasets");

  SimulationPlan plan = null_one_sample(50, 2000, 12, 1);
  plan.law_replicates = 20000;
  const StudyResult s1 = run_type1_study(plan);
  const StudyResult s1b = run_type1_study(plan);
  plan.threads = many;
  const StudyResult sn = run_type1_study(plan);
  expect(same_bits(s1.statistics, s1b.statistics) && s1.critical_value == s1b.critical_value,
         "study reruns");
  expect(same_bits(s1.statistics, sn.statistics) && s1.critical_value == sn.critical_value &&
             s1.rate == sn.rate,
         fmt("study 1 vs %d threads", many));

  const FMixture hl = m_sample_null_law(Partition({3, 4}), 120, 3);
  expect(same_bits(mixture_sample(hl, 20000, 13, 1), mixture_sample(hl, 20000, 13, many)),
         "mixture draws");

  TestOptions opt;
  opt.replicates = 20000;
  opt.seed = 14;
  opt.threads = 1;
  const TestReport r1 = one_sample_test(d1, Eigen::VectorXd::Zero(7), opt);
  opt.threads = many;
  const TestReport rn = one_sample_test(d1, Eigen::VectorXd::Zero(7), opt);
  expect(io::report_to_json(r1).dump() == io::report_to_json(rn).dump(), "test reports");

  if (!cli.empty()) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ubmat_acceptance";
    fs::create_directories(dir);
    const fs::path data = dir / "data.csv";
    const fs::path labels = dir / "labels.txt";
    const fs::path plan_path = dir / "plan.json";
    io::write_text_atomic(data.string(), io::dataset_to_csv(d1, false));
    std::string label_text;
    for (Index i = 0; i < d1.rows(); ++i) label_text += std::to_string(1 + i % 3) + "\n";
    io::write_text_atomic(labels.string(), label_text);
    SimulationPlan cli_plan = null_one_sample(50, 500, 15, 0);
    cli_plan.law_replicates = 20000;
    io::write_text_atomic(plan_path.string(), io::plan_to_json(cli_plan).dump(2) + "\n");
    const std::vector<std::string> commands = {
        "test1 --data " + data.string() + " --partition 3,4 --mu0 0,0,0,0,0,0,0 --seed 16 --replicates 20000 --json",
        "testm --data " + data.string() + " --labels " + labels.string() + " --partition 3,4 --seed 17 --replicates 20000 --json",
        "simulate --plan " + plan_path.string() + " --json",
    };
    for (const std::string& c : commands) {
      int st1 = 0, st2 = 0, st3 = 0;
      const std::string base = "'" + cli + "' " + c;
      const std::string o1 = run_capture(base + " --threads 1", st1);
      const std::string o2 = run_capture(base + " --threads 1", st2);
      const std::string on = run_capture(base + " --threads " + std::to_string(many), st3);
      expect(st1 == 0 && st2 == 0 && st3 == 0 && !o1.empty() && o1 == o2 && o1 == on,
             "cli " + c.substr(0, c.find(' ')));
    }
  }
  std::string detail;
  for (const auto& c : checks) detail += (detail.empty() ? "" : ", ") + c;
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the ubmat library"};
  std::string cli;
  std::vector<int> only;
  app.add_option("--cli", cli, "ubmat executable for the command-line determinism check");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"coordinate/dense equivalence", criterion_equivalence},
      {"worked instance", criterion_worked_instance},
      {"statistic decomposition", criterion_decomposition},
      {"one-sample null calibration", criterion_one_sample_null},
      {"M-sample null calibration", criterion_m_sample_null},
      {"large-n chi-square mean", criterion_asymptotic},
      {"estimator recovery and unbiasedness", criterion_estimators},
      {"Morrison approximation", criterion_morrison},
      {"power cross-validation", criterion_power},
      {"performance", criterion_performance},
      {"determinism", [&] { return criterion_determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << " "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
