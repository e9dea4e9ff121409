#include "ubmat/bench.hpp"

#include "ubmat/errors.hpp"
#include "ubmat/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ubmat::bench {

namespace {

volatile double sink = 0.0;

template <typename F>
double median_seconds(int repeats, F&& f) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  return t[t.size() / 2];
}

}  // namespace

std::vector<Preset> presets() {
  return {{"proteomics", balanced_partition(107, 7)},
          {"imaging", balanced_partition(227, 5)},
          {"large", balanced_partition(1024, 8)}};
}

Preset preset(const std::string& name) {
  for (auto& p : presets())
    if (p.name == name) return p;
  throw InvalidInput("unknown preset '" + name + "' (proteomics, imaging, large)");
}

Partition balanced_partition(Index p, Index k) {
  if (k < 1 || p < 2 * k) throw InvalidInput("need p >= 2K for a balanced partition");
  std::vector<Index> sizes(static_cast<std::size_t>(k), p / k);
  for (Index i = 0; i < p % k; ++i) ++sizes[static_cast<std::size_t>(k - 1 - i)];
  return Partition(sizes);
}

UBMatrix bench_instance(const Partition& partition) {
  const Index k = partition.blocks();
  Eigen::VectorXd a(k);
  Eigen::MatrixXd b(k, k);
  for (Index i = 0; i < k; ++i) {
    a(i) = 1.0 + static_cast<double>(i) / static_cast<double>(k);
    for (Index j = 0; j < k; ++j)
      b(i, j) = 0.3 * std::pow(0.5, static_cast<double>(std::abs(i - j)));
  }
  return UBMatrix(a, b, partition);
}

std::string to_string(Op op) {
  switch (op) {
    case Op::det: return "det";
    case Op::inv: return "inv";
    case Op::det_inv: return "det+inv";
    case Op::eig: return "eig";
    case Op::mul: return "mul";
  }
  return "?";
}

Op parse_op(const std::string& text) {
  for (Op op : {Op::det, Op::inv, Op::det_inv, Op::eig, Op::mul})
    if (to_string(op) == text) return op;
  throw InvalidInput("unknown op '" + text + "' (det, inv, det+inv, eig, mul)");
}

Row run(const std::string& name, const Partition& partition, Op op,
        const Options& options) {
  const UBMatrix x = bench_instance(partition);
  Row row{name, partition.dim(), partition.blocks(), op, options.repeats, 0.0,
          std::nullopt, std::nullopt};
  row.coordinate_seconds = median_seconds(options.repeats, [&] {
    switch (op) {
      case Op::det: sink = determinant(x); break;
      case Op::inv: sink = inverse(x).a()(0); break;
      case Op::det_inv: sink = determinant(x) + inverse(x).a()(0); break;
      case Op::eig: sink = eigenvalues(x).front().value; break;
      case Op::mul: sink = multiply(x, x).a()(0); break;
    }
  });
  const Index limit = op == Op::eig ? options.dense_limit / 4 : options.dense_limit;
  if (partition.dim() <= limit) {
    const DenseMatrix dense = expand(x);
    row.dense_seconds = median_seconds(options.dense_repeats, [&] {
      switch (op) {
        case Op::det: sink = oracle::determinant(dense); break;
        case Op::inv: sink = oracle::inverse(dense)(0, 0); break;
        case Op::det_inv:
          sink = oracle::determinant(dense) + oracle::inverse(dense)(0, 0);
          break;
        case Op::eig: sink = oracle::symmetric_eigen(dense).values.front(); break;
        case Op::mul: sink = oracle::matmul(dense, dense)(0, 0); break;
      }
    });
    row.speedup = *row.dense_seconds / row.coordinate_seconds;
  }
  return row;
}

}  // namespace ubmat::bench
