#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "exarray/analysis.hpp"
#include "exarray/error.hpp"
#include "exarray/io.hpp"

namespace py = pybind11;
using namespace exarray;
using io::Json;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

/// k = -1 infers a finite alphabet from the largest entry; k = 0 is the unit interval.
FiniteArray to_array(const Matrix& a, int k, bool symmetric, bool zero_diagonal) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InvalidArgument("array must be a square 2-d matrix");
  const int m = static_cast<int>(a.shape(0));
  std::vector<double> v(a.data(), a.data() + a.size());
  if (k < 0) {
    double top = 1;
    for (double x : v) top = std::max(top, x);
    k = static_cast<int>(top) + 1;
  }
  const Alphabet alphabet = k == 0 ? Alphabet::unit_interval() : Alphabet::finite(k);
  return FiniteArray(m, alphabet, std::move(v), {symmetric, zero_diagonal});
}

Matrix to_numpy(const FiniteArray& y) {
  Matrix out({y.side(), y.side()});
  std::copy(y.values().begin(), y.values().end(), out.mutable_data());
  return out;
}

Json parse_config(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("invalid JSON config: ") + e.what());
  }
}

py::object measure_json(const EmpiricalMeasure& mu) { return py::str(io::measure_to_json(mu).dump()); }

/// Simulation result kept on the C++ side so jumps can be classified without copying.
struct PyTrajectory {
  Trajectory traj;
};

}  // namespace

PYBIND11_MODULE(_exarray, m) {
  m.doc() = "Exchangeable arrays: sampling, sub-array limits, dynamics and tests";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_RuntimeError);

  m.def("falling_factorial", &falling_factorial, py::arg("m"), py::arg("n"));

  m.def(
      "sample",
      [](const std::string& config, int side, std::uint64_t seed) {
        const auto cfg = io::sampler_config_from_json(parse_config(config));
        if (cfg.counterexample) {
          auto s = sample_counterexample_initial(side, Seed{seed});
          return py::make_tuple(to_numpy(s.graph), py::cast(s.hidden_types));
        }
        const auto y = cfg.weakly_exchangeable ? sample_weakly_exchangeable(*cfg.f, side, Seed{seed}, cfg.zero_diagonal)
                                               : sample_exchangeable(*cfg.f, side, Seed{seed});
        return py::make_tuple(to_numpy(y), py::object(py::none()));
      },
      py::arg("config"), py::arg("m"), py::arg("seed"));

  m.def(
      "subarray_measure",
      [](const Matrix& a, int k, int n, bool exact, std::uint64_t draws, std::uint64_t seed, bool weak, int threads,
         int bins) {
        const auto y = to_array(a, k, weak, false);
        EstimatorOptions opts;
        opts.threads = threads;
        opts.bins = bins;
        py::gil_scoped_release release;
        EmpiricalMeasure mu = [&] {
          if (weak) {
            return empirical_subarray_weak(y, n, exact ? SubarrayMode::exact_mode()
                                                       : SubarrayMode::monte_carlo(draws, Seed{seed}),
                                           opts);
          }
          return exact ? empirical_subarray_exact(y, n, opts) : empirical_subarray_mc(y, n, draws, Seed{seed}, opts);
        }();
        py::gil_scoped_acquire acquire;
        return measure_json(mu);
      },
      py::arg("array"), py::arg("k"), py::arg("n"), py::arg("exact"), py::arg("draws"), py::arg("seed"),
      py::arg("weak"), py::arg("threads"), py::arg("bins"));

  m.def(
      "graph_ind",
      [](const Matrix& f, const Matrix& g) {
        return graph_ind(LabeledGraph(to_array(f, 2, true, true)), LabeledGraph(to_array(g, 2, true, true)));
      },
      py::arg("F"), py::arg("G"));
  m.def(
      "graph_density",
      [](const Matrix& f, const Matrix& g) {
        return graph_density(LabeledGraph(to_array(f, 2, true, true)), LabeledGraph(to_array(g, 2, true, true)));
      },
      py::arg("F"), py::arg("G"));

  py::class_<PyTrajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const PyTrajectory& t) { return t.traj.times; })
      .def_property_readonly("states",
                             [](const PyTrajectory& t) {
                               const auto& s = t.traj.states;
                               const py::ssize_t side = s.front().side();
                               py::array_t<double> out({static_cast<py::ssize_t>(s.size()), side, side});
                               double* p = out.mutable_data();
                               for (const auto& y : s) p = std::copy(y.values().begin(), y.values().end(), p);
                               return out;
                             })
      .def_property_readonly("continuous", [](const PyTrajectory& t) { return t.traj.mode == TimeMode::Continuous; })
      .def("__len__", [](const PyTrajectory& t) { return t.traj.size(); })
      .def("to_jsonl", [](const PyTrajectory& t) { return io::trajectory_to_jsonl(t.traj); })
      .def(
          "jumps",
          [](const PyTrajectory& t, double theta) {
            const auto events = classify_jumps(t.traj, theta);
            Json doc = io::jumps_to_json(events, theta);
            if (t.traj.event_log) doc["agreement"] = compare_with_log(t.traj, events).rate();
            return doc.dump();
          },
          py::arg("theta") = kDefaultThetaGlobal);

  m.def(
      "simulate",
      [](const std::string& kernel_config, const Matrix& init, int k, bool symmetric, bool zero_diagonal,
         std::optional<std::vector<std::uint8_t>> types, double horizon, std::uint64_t seed) {
        const auto kernel = io::kernel_from_json(parse_config(kernel_config));
        const auto x = to_array(init, k, symmetric, zero_diagonal);
        HiddenState latent;
        if (types) latent.xi = *types;
        py::gil_scoped_release release;
        return PyTrajectory{simulate(kernel, x, types ? &latent : nullptr, horizon, Seed{seed})};
      },
      py::arg("kernel"), py::arg("init"), py::arg("k"), py::arg("symmetric"), py::arg("zero_diagonal"),
      py::arg("types"), py::arg("horizon"), py::arg("seed"));

  m.def(
      "markov_test",
      [](int side, int N, std::uint64_t R, std::uint64_t seed, int threads, bool full) {
        MarkovTestOptions opts;
        opts.threads = threads;
        opts.full_simulation = full;
        MarkovTestReport r;
        {
          py::gil_scoped_release release;
          r = markov_test({}, side, N, R, Seed{seed}, opts);
        }
        py::dict d;
        d["m"] = r.m;
        d["N"] = r.N;
        d["runs"] = r.runs;
        d["one_step"] = r.one_step;
        d["history"] = r.history;
        d["one_step_halfwidth"] = r.one_step_halfwidth;
        d["history_halfwidth"] = r.history_halfwidth;
        d["one_step_conditioning"] = r.one_step_conditioning;
        d["history_conditioning"] = r.history_conditioning;
        d["history_closed_form"] = hidden_majority_history_probability(N);
        return d;
      },
      py::arg("m"), py::arg("N"), py::arg("R"), py::arg("seed"), py::arg("threads"), py::arg("full"));

  m.def(
      "locality_test",
      [](const std::string& kernel_config, int n, const Matrix& x, const Matrix& x_alt, int k, bool symmetric,
         bool zero_diagonal, double T, std::uint64_t R, std::uint64_t seed, int threads) {
        const auto kernel = io::kernel_from_json(parse_config(kernel_config));
        const auto a = to_array(x, k, symmetric, zero_diagonal);
        const auto b = to_array(x_alt, k, symmetric, zero_diagonal);
        py::gil_scoped_release release;
        const auto r = locality_test(kernel, n, a, b, T, R, Seed{seed}, threads);
        py::gil_scoped_acquire acquire;
        py::dict d;
        d["tv"] = r.tv;
        d["noise_band"] = r.noise_band;
        d["patterns"] = r.patterns;
        d["runs"] = r.runs;
        return d;
      },
      py::arg("kernel"), py::arg("n"), py::arg("x"), py::arg("x_alt"), py::arg("k"), py::arg("symmetric"),
      py::arg("zero_diagonal"), py::arg("T"), py::arg("R"), py::arg("seed"), py::arg("threads"));

  m.def(
      "dispersion_test",
      [](const Matrix& a, int k, std::uint64_t B, std::uint64_t seed, int threads) {
        const auto r = dispersion_test(to_array(a, k, false, false), B, Seed{seed}, threads);
        py::dict d;
        d["statistic"] = r.statistic;
        d["band"] = r.band;
        d["replicates"] = r.replicates;
        return d;
      },
      py::arg("array"), py::arg("k"), py::arg("B"), py::arg("seed"), py::arg("threads"));
}
