#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "momw1/blocking.hpp"
#include "momw1/estimators.hpp"
#include "momw1/exact_ot.hpp"
#include "momw1/experiments.hpp"
#include "momw1/optim.hpp"
#include "momw1/sample.hpp"
#include "momw1/wgan.hpp"

namespace py = pybind11;
using namespace momw1;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Outlier-robust Wasserstein-1 estimation via median-of-means critics";

  py::register_exception<DivergenceError>(m, "DivergenceError");

  // ---- samples -----------------------------------------------------------
  py::class_<Sample>(m, "Sample")
      .def(py::init<>())
      .def_readwrite("points", &Sample::points)
      .def_readwrite("inlier_mask", &Sample::inlier_mask)
      .def_readwrite("tau", &Sample::tau)
      .def_property_readonly("n", &Sample::n)
      .def_property_readonly("dim", &Sample::dim)
      .def("outlier_count", &Sample::outlier_count)
      .def("inlier_points", &Sample::inlier_points)
      .def("validate", &Sample::validate);

  py::class_<ContaminationSpec>(m, "ContaminationSpec")
      .def_static("none", &ContaminationSpec::none)
      .def_static("isolated_uniform", &ContaminationSpec::isolated_uniform, py::arg("low"),
                  py::arg("high"), py::arg("tau"))
      .def_static("aggregate_cauchy", &ContaminationSpec::aggregate_cauchy, py::arg("shift"),
                  py::arg("tau"));

  py::class_<InlierSpec>(m, "InlierSpec")
      .def(py::init([](Point mean, int n) {
             InlierSpec s;
             s.mean = std::move(mean);
             s.n = n;
             return s;
           }),
           py::arg("mean"), py::arg("n"));

  m.def("generate_sample", &generate_sample, py::arg("inliers"), py::arg("contamination"),
        py::arg("seed"));
  m.def("true_w1_reference", &true_w1_reference);
  m.def("write_sample_csv", &write_sample_csv_file, py::arg("sample"), py::arg("path"));
  m.def("read_sample_csv", &read_sample_csv_file, py::arg("path"));
  m.def("make_toy_x", &make_toy_x, py::arg("dataset"), py::arg("n"), py::arg("tau"),
        py::arg("seed"));
  m.def("make_toy_y", &make_toy_y, py::arg("n"), py::arg("seed"));

  py::enum_<ToyDataset>(m, "ToyDataset").value("D1", ToyDataset::D1).value("D2", ToyDataset::D2);

  // ---- blocking ----------------------------------------------------------
  m.def("recommended_k", &recommended_k, py::arg("n"), py::arg("tau"));
  m.def("combined_tau_tilde", &combined_tau_tilde, py::arg("tau_x"), py::arg("tau_y"));
  m.def(
      "median_index",
      [](const std::vector<double>& v) { return median_index(v); },
      py::arg("values"));
  m.def(
      "median_value",
      [](const std::vector<double>& v) { return median_value(v); },
      py::arg("values"));
  m.def(
      "partition_blocks",
      [](int n, int k, uint64_t seed) {
        const auto a = assign_blocks(n, BlockScheme::partition(k), seed);
        return py::make_tuple(a.blocks, a.dropped);
      },
      py::arg("n"), py::arg("k"), py::arg("seed"),
      "Shuffled partition into k blocks; returns (blocks, dropped).");

  // ---- estimators --------------------------------------------------------
  py::enum_<PairSchemeKind>(m, "PairScheme")
      .value("Grid", PairSchemeKind::Grid)
      .value("Diagonal", PairSchemeKind::Diagonal)
      .value("RandomizedPairs", PairSchemeKind::RandomizedPairs);

  m.def(
      "mom_estimate",
      [](const Sample& s, const std::function<double(const Point&)>& f, int k, uint64_t seed) {
        const auto r = mom_estimate(s, f, k, seed);
        return py::make_tuple(r.value, r.median_block);
      },
      py::arg("sample"), py::arg("f"), py::arg("k"), py::arg("seed"));
  m.def(
      "mom_from_values",
      [](const std::vector<double>& values, int k, uint64_t seed) {
        const auto r = mom_from_values(values, k, seed);
        return py::make_tuple(r.value, r.median_block);
      },
      py::arg("values"), py::arg("k"), py::arg("seed"));
  m.def(
      "mou_estimate",
      [](const Sample& x, const Sample& y,
         const std::function<double(const Point&, const Point&)>& h, int k_x, int k_y,
         PairSchemeKind scheme, uint64_t seed) {
        const auto r = mou_estimate(x, y, h, k_x, k_y, scheme, seed);
        return py::make_tuple(r.value, r.median_pairs);
      },
      py::arg("x"), py::arg("y"), py::arg("h"), py::arg("k_x"), py::arg("k_y"), py::arg("scheme"),
      py::arg("seed"));

  // ---- critic ------------------------------------------------------------
  py::class_<CriticNet>(m, "CriticNet")
      .def_static("init", &CriticNet::init, py::arg("in_dim"), py::arg("hidden"),
                  py::arg("clip_c"), py::arg("seed"))
      .def_readwrite("w1", &CriticNet::w1)
      .def_readwrite("b1", &CriticNet::b1)
      .def_readwrite("w2", &CriticNet::w2)
      .def_readwrite("b2", &CriticNet::b2)
      .def_readonly("in_dim", &CriticNet::in_dim)
      .def_readonly("hidden", &CriticNet::hidden)
      .def("forward", [](const CriticNet& n, const Point& x) { return n.forward(x); })
      .def("to_json", &CriticNet::to_json)
      .def_static("from_json", &CriticNet::from_json);
  m.def("clip_weights", &clip_weights, py::arg("net"), py::arg("c"),
        py::arg("clip_biases") = false);
  m.def("lipschitz_bound", &lipschitz_bound);

  // ---- training ----------------------------------------------------------
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("n_iter", &TrainConfig::n_iter)
      .def_readwrite("k_x", &TrainConfig::k_x)
      .def_readwrite("k_y", &TrainConfig::k_y)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("clip_c", &TrainConfig::clip_c)
      .def_readwrite("hidden", &TrainConfig::hidden)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("reshuffle", &TrainConfig::reshuffle)
      .def_readwrite("rms_decay", &TrainConfig::rms_decay)
      .def_readwrite("rms_epsilon", &TrainConfig::rms_epsilon)
      .def_readwrite("clip_biases", &TrainConfig::clip_biases);

  py::class_<TracePoint>(m, "TracePoint")
      .def_readonly("iteration", &TracePoint::iteration)
      .def_readonly("epoch", &TracePoint::epoch)
      .def_readonly("objective", &TracePoint::objective);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("trace", &RunReport::trace)
      .def_readonly("final_estimate", &RunReport::final_estimate)
      .def_readonly("wall_time_s", &RunReport::wall_time_s);

  m.def("iters_for_epochs", &iters_for_epochs, py::arg("epochs"), py::arg("k"));
  m.def("train_w_mom",
        [](const Sample& x, const Sample& y, const TrainConfig& cfg) { return train_w_mom(x, y, cfg); });
  m.def("train_w_mou_diag", [](const Sample& x, const Sample& y, const TrainConfig& cfg) {
    return train_w_mou_diag(x, y, cfg);
  });
  m.def("train_w_mou",
        [](const Sample& x, const Sample& y, const TrainConfig& cfg) { return train_w_mou(x, y, cfg); });

  // ---- exact OT ----------------------------------------------------------
  m.def(
      "exact_w1",
      [](const std::vector<Point>& xs, const std::vector<Point>& ys) { return exact_w1(xs, ys); },
      py::arg("xs"), py::arg("ys"));
  m.def("exact_w1_dual_check",
        [](const std::vector<Point>& xs, const std::vector<Point>& ys, const CriticNet& critic) {
          return exact_w1_dual_check(xs, ys, critic);
        });

  // ---- wgan --------------------------------------------------------------
  py::class_<Generator>(m, "Generator")
      .def("forward", [](const Generator& g, const Point& z) { return g.forward(z); })
      .def("sample", &Generator::sample, py::arg("n"), py::arg("seed"));

  py::class_<GanConfig>(m, "GanConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &GanConfig::batch_size)
      .def_readwrite("n_critic", &GanConfig::n_critic)
      .def_readwrite("k_blocks", &GanConfig::k_blocks)
      .def_readwrite("lr", &GanConfig::lr)
      .def_readwrite("gen_lr", &GanConfig::gen_lr)
      .def_readwrite("clip_c", &GanConfig::clip_c)
      .def_readwrite("latent_dim", &GanConfig::latent_dim)
      .def_readwrite("max_generator_steps", &GanConfig::max_generator_steps)
      .def_readwrite("seed", &GanConfig::seed);

  py::class_<GeneratorScores>(m, "GeneratorScores")
      .def_readonly("mean_error", &GeneratorScores::mean_error)
      .def_readonly("w1_to_inliers", &GeneratorScores::w1_to_inliers);

  m.def("train_momwgan",
        [](const Sample& data, const GanConfig& cfg) { return train_momwgan(data, cfg); });
  m.def("score_generator", &score_generator, py::arg("generator"), py::arg("reference_inliers"),
        py::arg("n_gen"), py::arg("seed"));
}
