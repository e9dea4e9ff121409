#include "ubmat/ubmat.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ubmat;

namespace {

Partition to_partition(const std::vector<Index>& sizes) { return Partition(sizes); }

Dataset make_dataset(const Eigen::MatrixXd& x, const std::vector<Index>& sizes,
                     const std::optional<std::vector<int>>& labels) {
  return Dataset(x, to_partition(sizes), labels);
}

TestOptions make_options(double alpha, const std::string& method, std::int64_t replicates,
                         std::uint64_t seed, int threads, bool allow_small_n) {
  TestOptions opt;
  opt.alpha = alpha;
  opt.method = parse_method(method);
  opt.replicates = replicates;
  opt.seed = seed;
  opt.threads = threads;
  opt.estimation.allow_small_n = allow_small_n;
  return opt;
}

// JSON documents cross the boundary as Python objects through the json module.
py::object to_python(const io::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

io::Json from_python(const py::object& o) {
  return io::parse_json(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Uniform-block covariance matrices: coordinate algebra, estimation and mean tests.";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<SingularError>(m, "SingularError", PyExc_ArithmeticError);

  py::class_<UBMatrix>(m, "UBMatrix")
      .def(py::init([](const Eigen::VectorXd& a, const Eigen::MatrixXd& b, const std::vector<Index>& p) {
             return UBMatrix(a, b, to_partition(p));
           }),
           py::arg("a"), py::arg("b"), py::arg("partition"))
      .def_static("from_dense",
                  [](const Eigen::MatrixXd& dense, const std::vector<Index>& p, double tolerance) {
                    Tolerances tol;
                    tol.uniformity = tolerance;
                    return compress(DenseMatrix::from_eigen(dense), to_partition(p), tol);
                  },
                  py::arg("dense"), py::arg("partition"), py::arg("tolerance") = 1e-8)
      .def_static("identity", [](const std::vector<Index>& p) { return UBMatrix::identity(to_partition(p)); })
      .def_property_readonly("a", &UBMatrix::a)
      .def_property_readonly("b", &UBMatrix::b)
      .def_property_readonly("partition", [](const UBMatrix& x) { return x.partition().sizes(); })
      .def_property_readonly("dim", &UBMatrix::dim)
      .def_property_readonly("delta", &UBMatrix::delta)
      .def("dense", [](const UBMatrix& x) { return expand(x).to_eigen(); })
      .def("determinant", [](const UBMatrix& x) { return determinant(x); })
      .def("inverse", [](const UBMatrix& x) { return inverse(x); })
      .def("eigenvalues", [](const UBMatrix& x) { return eigenvalue_list(x); })
      .def("power", [](const UBMatrix& x, int k) { return power(x, k); }, py::arg("m"))
      .def("is_positive_definite", [](const UBMatrix& x) { return is_positive_definite(x); })
      .def("precision", [](const UBMatrix& x) { return precision_coordinates(x); })
      .def("correlation", [](const UBMatrix& x) { return correlation_coordinates(x); })
      .def("apply", [](const UBMatrix& x, const Eigen::VectorXd& v) { return apply(x, v); })
      .def("to_dict", [](const UBMatrix& x) { return to_python(io::coordinates_to_json(x)); })
      .def_static("from_dict", [](const py::object& o) { return io::coordinates_from_json(from_python(o)); })
      .def("__add__", [](const UBMatrix& x, const UBMatrix& y) { return add(x, y); })
      .def("__sub__", [](const UBMatrix& x, const UBMatrix& y) { return subtract(x, y); })
      .def("__matmul__", [](const UBMatrix& x, const UBMatrix& y) { return multiply(x, y); })
      .def("__eq__", [](const UBMatrix& x, const UBMatrix& y) { return x == y; })
      .def("__repr__", [](const UBMatrix& x) {
        return "UBMatrix(partition=" + x.partition().to_string() + ")";
      });

  m.def("canonical_form", [](const UBMatrix& x) {
    const SpectralForm f = canonical_form(x);
    py::dict d;
    d["within_block"] = f.within_block;
    d["delta_values"] = f.delta_values;
    d["xi"] = f.xi;
    d["diagonal"] = f.diagonal();
    d["gamma"] = f.gamma().to_eigen();
    return d;
  });

  m.def("estimate",
        [](const Eigen::MatrixXd& x, const std::vector<Index>& p, bool allow_small_n) {
          EstimationOptions opt;
          opt.allow_small_n = allow_small_n;
          const Dataset d = make_dataset(x, p, std::nullopt);
          return estimate_coordinates(sample_moments(d), d.partition(), opt);
        },
        py::arg("data"), py::arg("partition"), py::arg("allow_small_n") = false,
        "Unbiased covariance coordinates from an n x p data matrix.");

  m.def("one_sample_test",
        [](const Eigen::MatrixXd& x, const std::vector<Index>& p, const Eigen::VectorXd& mu0, double alpha,
           const std::string& method, std::int64_t replicates, std::uint64_t seed, int threads,
           bool allow_small_n) {
          const TestReport r = one_sample_test(make_dataset(x, p, std::nullopt), mu0,
                                               make_options(alpha, method, replicates, seed, threads, allow_small_n));
          return to_python(io::report_to_json(r));
        },
        py::arg("data"), py::arg("partition"), py::arg("mu0"), py::arg("alpha") = 0.05,
        py::arg("method") = "mc", py::arg("replicates") = 100000, py::arg("seed") = 1,
        py::arg("threads") = 0, py::arg("allow_small_n") = false);

  m.def("m_sample_test",
        [](const Eigen::MatrixXd& x, const std::vector<Index>& p, const std::vector<int>& labels, double alpha,
           const std::string& method, std::int64_t replicates, std::uint64_t seed, int threads,
           bool allow_small_n) {
          const TestReport r = m_sample_test(make_dataset(x, p, labels),
                                             make_options(alpha, method, replicates, seed, threads, allow_small_n));
          return to_python(io::report_to_json(r));
        },
        py::arg("data"), py::arg("partition"), py::arg("labels"), py::arg("alpha") = 0.05,
        py::arg("method") = "mc", py::arg("replicates") = 100000, py::arg("seed") = 1,
        py::arg("threads") = 0, py::arg("allow_small_n") = false);

  m.def("noncentrality", &noncentrality_parameters, py::arg("mu"), py::arg("mu0"), py::arg("sigma"),
        py::arg("n"));

  m.def("sample",
        [](const UBMatrix& sigma, const Eigen::VectorXd& mu, Index n, std::uint64_t seed) {
          return sample_ub_normal(sigma, mu, n, seed).observations();
        },
        py::arg("sigma"), py::arg("mu"), py::arg("n"), py::arg("seed") = 1,
        "n draws from N(mu, sigma) as an n x p array.");

  m.def("simulate",
        [](const py::object& plan, bool power) {
          SimulationPlan p = io::plan_from_json(from_python(plan));
          if (power) return to_python(io::power_to_json(run_power_study(p)));
          return to_python(io::study_to_json(run_rejection_study(p)));
        },
        py::arg("plan"), py::arg("power") = false,
        "Runs a simulation plan given as a dict in the plan file layout.");

  m.def("null_quantile",
        [](const std::vector<Index>& p, Index n, int groups, double alpha, std::int64_t replicates,
           std::uint64_t seed) {
          const Partition part = to_partition(p);
          const FMixture law = groups <= 1 ? one_sample_null_law(part, n) : m_sample_null_law(part, n, groups);
          return mixture_quantile(law, alpha, replicates, seed).value;
        },
        py::arg("partition"), py::arg("n"), py::arg("groups") = 1, py::arg("alpha") = 0.05,
        py::arg("replicates") = 100000, py::arg("seed") = 1);
}
