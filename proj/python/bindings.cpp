#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "slim/cv.hpp"
#include "slim/io.hpp"
#include "slim/mip.hpp"
#include "slim/solver.hpp"

namespace py = pybind11;
using namespace slim;

namespace {

SlimConfig make_config(const std::string& c0, const std::string& c1, const std::string& intercept,
                       double time_limit, unsigned threads, std::uint64_t seed, std::uint64_t node_limit,
                       double epsilon, std::optional<double> big_m) {
  SlimConfig cfg;
  cfg.c0 = Penalty::parse(c0);
  cfg.c1 = Penalty::parse(c1);
  cfg.intercept = parse_intercept_policy(intercept);
  if (!(time_limit > 0)) throw Error(ErrorCode::invalid_config, "time_limit must be positive");
  cfg.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(time_limit * 1000)));
  cfg.threads = threads;
  cfg.seed = seed;
  cfg.node_limit = node_limit;
  cfg.epsilon = epsilon;
  cfg.big_m = big_m;
  cfg.validate();
  return cfg;
}

Dataset make_dataset(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                     std::optional<std::vector<std::string>> names) {
  const std::size_t n = rows.size();
  const std::size_t p = n ? rows.front().size() : 0;
  std::vector<double> flat;
  flat.reserve(n * p);
  for (const auto& r : rows) {
    if (r.size() != p) throw Error(ErrorCode::dimension_mismatch, "ragged feature rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  std::vector<std::string> cols;
  if (names) {
    cols = *names;
  } else {
    for (std::size_t j = 0; j < p; ++j) cols.push_back("x" + std::to_string(j + 1));
  }
  return Dataset(std::move(flat), n, p, std::move(labels), std::move(cols));
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["model"] = r.incumbent;
  d["objective"] = r.objective_value.value();
  d["lower_bound"] = r.best_lower_bound.value();
  d["gap"] = r.gap;
  d["nodes"] = r.nodes_expanded;
  d["seconds"] = static_cast<double>(r.elapsed.count()) / 1000.0;
  d["status"] = std::string(to_string(r.status));
  return d;
}

#define SLIM_CONFIG_ARGS                                                                                   \
  py::arg("c0") = "0.01", py::arg("c1") = "0.00001", py::arg("intercept") = "unpenalized",              \
  py::arg("time_limit") = 300.0, py::arg("threads") = 1u, py::arg("seed") = 0u, py::arg("node_limit") = 0u, \
  py::arg("epsilon") = 0.1, py::arg("big_m") = py::none()

}  // namespace

PYBIND11_MODULE(_slim, m) {
  m.doc() = "Sparse integer linear scoring systems";

  py::register_exception<Error>(m, "SlimError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("rows"), py::arg("labels"), py::arg("feature_names") = py::none())
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("p", &Dataset::p)
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("labels",
                             [](const Dataset& d) { return std::vector<int>(d.labels().begin(), d.labels().end()); })
      .def("row", [](const Dataset& d, std::size_t i) {
        if (i >= d.n()) throw py::index_error();
        return std::vector<double>(d.row(i).begin(), d.row(i).end());
      });

  py::class_<CoefficientLattice>(m, "Lattice")
      .def_property_readonly("p", &CoefficientLattice::p)
      .def_property_readonly("bound", &CoefficientLattice::bound)
      .def_property_readonly("id", &CoefficientLattice::id)
      .def("values", [](const CoefficientLattice& l, std::size_t j) {
        if (j >= l.p()) throw py::index_error();
        return std::vector<Coefficient>(l.values(j).begin(), l.values(j).end());
      });

  py::class_<ScoringSystem>(m, "ScoringSystem")
      .def(py::init([](std::vector<Coefficient> c, Coefficient b, std::vector<std::string> names) {
             ScoringSystem s;
             s.coefficients = std::move(c);
             s.intercept = b;
             s.feature_names = std::move(names);
             return s;
           }),
           py::arg("coefficients"), py::arg("intercept"), py::arg("feature_names"))
      .def_readwrite("coefficients", &ScoringSystem::coefficients)
      .def_readwrite("intercept", &ScoringSystem::intercept)
      .def_readwrite("feature_names", &ScoringSystem::feature_names)
      .def_readwrite("lattice_id", &ScoringSystem::lattice_id)
      .def_property_readonly("size", &ScoringSystem::model_size)
      .def("predict", [](const ScoringSystem& s, const Dataset& d) { return predict(s, d); })
      .def("__str__", &render_scoring_system)
      .def("__eq__", [](const ScoringSystem& a, const ScoringSystem& b) { return a == b; });

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& label, const std::string& positive,
         const std::string& negative, std::vector<std::string> drop) {
        return ingest_csv(path, CsvOptions{label, positive, negative, std::move(drop)});
      },
      py::arg("path"), py::arg("label") = "", py::arg("positive") = "1", py::arg("negative") = "",
      py::arg("drop") = std::vector<std::string>{});

  m.def("parse_lattice", &parse_lattice, py::arg("spec"), py::arg("p"));

  m.def(
      "solve",
      [](const Dataset& d, const CoefficientLattice& l, const std::string& c0, const std::string& c1,
         const std::string& intercept, double time_limit, unsigned threads, std::uint64_t seed,
         std::uint64_t node_limit, double epsilon, std::optional<double> big_m,
         std::vector<ScoringSystem> warm_starts) {
        const SlimConfig cfg = make_config(c0, c1, intercept, time_limit, threads, seed, node_limit, epsilon, big_m);
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = solve(d, l, cfg, warm_starts);
        }
        return report_dict(r);
      },
      py::arg("data"), py::arg("lattice"), SLIM_CONFIG_ARGS, py::arg("warm_starts") = std::vector<ScoringSystem>{});

  m.def(
      "brute_force",
      [](const Dataset& d, const CoefficientLattice& l, const std::string& c0, const std::string& c1,
         const std::string& intercept, double time_limit, unsigned threads, std::uint64_t seed,
         std::uint64_t node_limit, double epsilon, std::optional<double> big_m) {
        const SlimConfig cfg = make_config(c0, c1, intercept, time_limit, threads, seed, node_limit, epsilon, big_m);
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = brute_force(d, l, cfg);
        }
        return report_dict(r);
      },
      py::arg("data"), py::arg("lattice"), SLIM_CONFIG_ARGS);

  m.def(
      "objective",
      [](const Dataset& d, const ScoringSystem& s, const std::string& c0, const std::string& c1,
         const std::string& intercept) {
        SlimConfig cfg = make_config(c0, c1, intercept, 1, 1, 0, 0, 0.1, std::nullopt);
        const ObjectiveValue v = objective(d, s, cfg);
        const Rational q = v.exact();
        return py::make_tuple(static_cast<long long>(q.num()), static_cast<long long>(q.den()), v.value());
      },
      py::arg("data"), py::arg("model"), py::arg("c0") = "0.01", py::arg("c1") = "0.00001",
      py::arg("intercept") = "unpenalized");

  m.def(
      "export_mip",
      [](const Dataset& d, const CoefficientLattice& l, const std::string& format, const std::string& c0,
         const std::string& c1, const std::string& intercept, double epsilon, std::optional<double> big_m) {
        const SlimConfig cfg = make_config(c0, c1, intercept, 1, 1, 0, 0, epsilon, big_m);
        const MipInstance mip = encode(d, l, cfg);
        py::dict out;
        out["text"] = export_mip(mip, parse_mip_format(format));
        out["variables"] = mip.variables.size();
        out["constraints"] = mip.constraints.size();
        return out;
      },
      py::arg("data"), py::arg("lattice"), py::arg("format") = "interchange-free", py::arg("c0") = "0.01",
      py::arg("c1") = "0.00001", py::arg("intercept") = "unpenalized", py::arg("epsilon") = 0.1,
      py::arg("big_m") = py::none());

  m.def(
      "cross_validate",
      [](const Dataset& d, const CoefficientLattice& l, std::size_t folds, std::uint64_t fold_seed,
         const std::string& c0, const std::string& c1, const std::string& intercept, double time_limit,
         unsigned threads, std::uint64_t seed, std::uint64_t node_limit, double epsilon,
         std::optional<double> big_m) {
        const SlimConfig cfg = make_config(c0, c1, intercept, time_limit, threads, seed, node_limit, epsilon, big_m);
        CvPlan plan;
        plan.k = folds;
        plan.seed = fold_seed;
        CvResult r;
        {
          py::gil_scoped_release release;
          r = cross_validate(d, l, cfg, plan);
        }
        py::list per_fold;
        for (const auto& f : r.per_fold) {
          py::dict fd;
          fd["test_error"] = f.test_error;
          fd["train_error"] = f.train_error;
          fd["size"] = f.model_size;
          fd["status"] = std::string(to_string(f.status));
          fd["model"] = f.model;
          per_fold.append(fd);
        }
        py::dict out;
        out["mean_test_error"] = r.mean_test_error;
        out["median_model_size"] = r.median_model_size;
        out["folds"] = per_fold;
        return out;
      },
      py::arg("data"), py::arg("lattice"), py::arg("folds") = 5, py::arg("fold_seed") = 0, SLIM_CONFIG_ARGS);

  m.def(
      "generalization_bound",
      [](double remp, double log_k, std::int64_t n, double delta) {
        return generalization_bound(remp, log_k, n, delta).bound_value;
      },
      py::arg("remp"), py::arg("log_k"), py::arg("n"), py::arg("delta"));
  m.def("log_cardinality", &log_cardinality, py::arg("lattice"));

  m.def(
      "serialize_model",
      [](const ScoringSystem& s) {
        ModelDocument doc;
        doc.model = s;
        return serialize(doc);
      },
      py::arg("model"));
  m.def(
      "parse_model", [](const std::string& text) { return parse_model_document(text).model; }, py::arg("text"));
  m.def(
      "render_tree",
      [](const ScoringSystem& s, const std::string& positive, const std::string& negative) {
        return render_tree(induce_tree(s, std::vector<bool>(s.p(), true)), TreeLabels{positive, negative});
      },
      py::arg("model"), py::arg("positive") = "+1", py::arg("negative") = "-1");
}
