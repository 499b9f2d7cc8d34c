#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irm/error.hpp"
#include "irm/experiment.hpp"
#include "irm/service.hpp"
#include "irm/session_io.hpp"
#include "irm/simuser.hpp"
#include "irm/skyline.hpp"

namespace py = pybind11;
using namespace irm;

namespace {

using DatasetPtr = std::shared_ptr<Dataset>;

std::vector<Point> pick(const Dataset& ds, const std::vector<PointId>& ids) {
  std::vector<Point> out;
  for (PointId id : ids) out.push_back(ds.points.at(id));
  return out;
}

}  // namespace

PYBIND11_MODULE(_irm, m) {
  m.doc() = "Interactive regret minimization engine";

  // Leaked on purpose: the translator may run during interpreter shutdown.
  static PyObject* exc_type = nullptr;
  {
    py::exception<Error> exc(m, "IrmError", PyExc_ValueError);
    exc_type = exc.ptr();
    Py_INCREF(exc_type);
  }
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(exc_type)(py::str(e.what()));
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(exc_type, err.ptr());
    }
  });

  m.attr("ENGINE_VERSION") = kEngineVersion;

  py::class_<Dataset, DatasetPtr>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_readonly("dim", &Dataset::dim)
      .def_readonly("columns", &Dataset::columns)
      .def("__len__", &Dataset::size)
      .def("coords", [](const Dataset& ds, PointId id) { return ds.points.at(id).coords; })
      .def("label", [](const Dataset& ds, PointId id) { return ds.points.at(id).label; })
      .def("original", [](const Dataset& ds, PointId id) { return ds.original(ds.points.at(id)); })
      .def("rows", [](const Dataset& ds) {
        std::vector<std::vector<double>> rows;
        for (const auto& p : ds.points) rows.push_back(p.coords);
        return rows;
      })
      .def("to_json", [](const Dataset& ds) { return to_json(ds).dump(); });

  m.def(
      "generate_dataset",
      [](const std::string& kind, std::size_t n, std::size_t d, std::uint64_t seed, const std::string& name) {
        DatasetSpec spec;
        spec.kind = dataset_kind_from_string(kind);
        spec.n = n;
        spec.d = d;
        spec.seed = seed;
        return std::make_shared<Dataset>(build_dataset(spec, name));
      },
      py::arg("kind") = "anti", py::arg("n") = 1000, py::arg("d") = 4, py::arg("seed") = 1, py::arg("name") = "");

  m.def(
      "load_dataset",
      [](const std::string& path, std::vector<std::string> columns, std::vector<std::string> labels,
         std::vector<std::string> invert, const std::string& name) {
        DatasetSpec spec;
        spec.kind = DatasetKind::File;
        spec.path = path;
        spec.columns = std::move(columns);
        spec.label_columns = std::move(labels);
        spec.invert = std::move(invert);
        return std::make_shared<Dataset>(build_dataset(spec, name));
      },
      py::arg("path"), py::arg("columns") = std::vector<std::string>{}, py::arg("labels") = std::vector<std::string>{},
      py::arg("invert") = std::vector<std::string>{}, py::arg("name") = "");

  m.def(
      "dataset_from_rows",
      [](const std::vector<std::vector<double>>& rows, const std::string& name, std::vector<std::string> columns) {
        std::vector<Point> raw;
        for (std::size_t i = 0; i < rows.size(); ++i) raw.push_back(Point{i, rows[i], ""});
        return std::make_shared<Dataset>(make_dataset(name, raw, std::move(columns)));
      },
      py::arg("rows"), py::arg("name") = "rows", py::arg("columns") = std::vector<std::string>{});

  m.def("dataset_from_json", [](const std::string& text) {
    return std::make_shared<Dataset>(dataset_from_json(nlohmann::json::parse(text)));
  });

  m.def("skyline", [](const Dataset& ds) { return compute_skyline(ds.points).ids; });

  m.def(
      "regret_ratio",
      [](const Dataset& ds, const std::vector<PointId>& subset, std::vector<double> weights) {
        return regret_ratio(ds.points, pick(ds, subset), UtilityVector{std::move(weights)});
      },
      py::arg("dataset"), py::arg("subset"), py::arg("weights"));

  py::class_<HiddenUser>(m, "HiddenUser")
      .def(py::init([](std::vector<double> w) { return HiddenUser(UtilityVector{std::move(w)}); }), py::arg("weights"))
      .def_static("sample", &HiddenUser::sample, py::arg("dim"), py::arg("seed"))
      .def_static(
          "from_original_weights",
          [](const Dataset& ds, std::vector<double> w) { return HiddenUser::from_original_weights(ds, std::move(w)); },
          py::arg("dataset"), py::arg("weights"))
      .def("sort", [](const HiddenUser& u, const Dataset& ds, const std::vector<PointId>& ids) {
        return u.sort_points(pick(ds, ids));
      })
      .def("favorite",
           [](const HiddenUser& u, const Dataset& ds, const std::vector<PointId>& ids) { return u.favorite(pick(ds, ids)); })
      .def("true_regret", [](const HiddenUser& u, const Dataset& ds, PointId id) {
        return u.true_regret(ds.points, ds.points.at(id));
      });

  py::class_<Session>(m, "Session")
      .def(py::init([](DatasetPtr ds, const std::string& algorithm, std::size_t s, double epsilon, std::uint64_t seed,
                       std::size_t max_rounds) {
             SessionOptions opt;
             opt.s = s;
             opt.epsilon = epsilon;
             opt.seed = seed;
             opt.max_rounds = max_rounds;
             return Session::start(std::move(ds), Strategy::from_name(algorithm), opt);
           }),
           py::arg("dataset"), py::arg("algorithm") = "sorting-simplex", py::arg("s") = 4, py::arg("epsilon") = 0.0,
           py::arg("seed") = 1, py::arg("max_rounds") = 1000)
      .def("next_display", &Session::next_display)
      .def("submit_sort", &Session::submit_sort, py::arg("order"), py::arg("ties") = std::vector<bool>{},
           py::arg("round") = std::nullopt)
      .def("submit_favorite", &Session::submit_favorite, py::arg("favorite"), py::arg("round") = std::nullopt)
      .def("stop", &Session::stop)
      .def("recommend",
           [](const Session& s) {
             const auto r = s.recommend();
             return py::make_tuple(r.point, r.regret_bound);
           })
      .def_property_readonly("algorithm", [](const Session& s) { return s.strategy().name(); })
      .def_property_readonly("status", [](const Session& s) { return std::string(to_string(s.status())); })
      .def_property_readonly("finished", &Session::finished)
      .def_property_readonly("round", &Session::current_round)
      .def_property_readonly("rounds_completed", &Session::rounds_completed)
      .def_property_readonly("total_displayed", &Session::total_displayed)
      .def_property_readonly("width", &Session::width)
      .def_property_readonly("apex", &Session::apex)
      .def_property_readonly("candidates", [](const Session& s) { return s.candidates().ids; })
      .def("contains_utility",
           [](const Session& s, const std::vector<double>& f, double tol) { return s.polytope().contains(f, tol); },
           py::arg("weights"), py::arg("tol") = 1e-9)
      .def("document", [](const Session& s, bool embed) { return session_document(s, embed).dump(); },
           py::arg("embed_dataset") = false);

  m.def(
      "replay",
      [](const std::string& text, std::optional<DatasetPtr> ds) {
        const auto doc = parse_session_text(text);
        return ds ? replay(doc, *ds) : replay(doc);
      },
      py::arg("document"), py::arg("dataset") = std::nullopt);

  m.def(
      "_run_experiment",
      [](DatasetPtr ds, const std::vector<std::string>& algorithms, std::vector<std::size_t> s_values,
         std::vector<double> epsilons, std::size_t trials, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.algorithms.clear();
        for (const auto& a : algorithms) cfg.algorithms.push_back(Strategy::from_name(a));
        cfg.s_values = std::move(s_values);
        cfg.epsilons = std::move(epsilons);
        cfg.trials = trials;
        cfg.base_seed = seed;
        return to_json(run_experiment(cfg, std::move(ds))).dump();
      });

  py::class_<Service>(m, "Service")
      .def(py::init([](const std::string& state_dir) { return std::make_unique<Service>(ServiceOptions{state_dir}); }),
           py::arg("state_dir") = "")
      .def("add_dataset", [](Service& s, const Dataset& ds, const std::string& id) { return s.add_dataset(ds, id); },
           py::arg("dataset"), py::arg("id") = "")
      .def("_handle", [](Service& s, const std::string& method, const std::string& path, const std::string& body) {
        const auto r = s.handle(method, path, body);
        return py::make_tuple(r.status, r.body.dump());
      });
}
