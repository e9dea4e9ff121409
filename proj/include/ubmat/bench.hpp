#pragma once

#include "ubmat/partition.hpp"
#include "ubmat/ub_matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ubmat::bench {

struct Preset {
  std::string name;
  Partition partition;
};

/// "proteomics" (K = 7, p = 107), "imaging" (K = 5, p = 227) and "large"
/// (K = 8, p = 1024).
std::vector<Preset> presets();
Preset preset(const std::string& name);

/// K nearly equal blocks summing to p.
Partition balanced_partition(Index p, Index k);

/// A fixed positive definite instance: a_kk = 1 + k/K and
/// b_kk' = 0.3 * 0.5^|k - k'|.
UBMatrix bench_instance(const Partition& partition);

enum class Op { det, inv, det_inv, eig, mul };
std::string to_string(Op op);
Op parse_op(const std::string& text);

struct Row {
  std::string name;
  Index p;
  Index k;
  Op op;
  int repeats;
  double coordinate_seconds;                // median wall clock
  std::optional<double> dense_seconds;      // median wall clock
  std::optional<double> speedup;
};

struct Options {
  int repeats = 21;
  int dense_repeats = 3;
  /// Dense timings are skipped above this p (eigen: a quarter of it).
  Index dense_limit = 1024;
};

Row run(const std::string& name, const Partition& partition, Op op,
        const Options& options = {});

}  // namespace ubmat::bench
