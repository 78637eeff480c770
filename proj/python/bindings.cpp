// Python bindings for the core library: representations, positivity of flag
// tuples, gap samples and the command pipeline.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anosov/config.hpp"
#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"
#include "anosov/pipeline.hpp"

namespace py = pybind11;
using namespace anosov;

namespace {

BoundaryPoint point(double x) { return std::isinf(x) ? BoundaryPoint::infinity() : BoundaryPoint::finite(x); }

std::vector<Moebius> moebius_list(const std::vector<std::array<double, 4>>& gens) {
  std::vector<Moebius> out;
  for (const auto& g : gens) out.emplace_back(g[0], g[1], g[2], g[3]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_anosov_lab, m) {
  m.doc() = "Numerical Anosov and Hitchin diagnostics";
  m.attr("__version__") = ANOSOV_VERSION;

  py::register_exception<Error>(m, "AnosovError", PyExc_RuntimeError);

  m.def("tau_d", &tau_d, py::arg("m"), py::arg("d"),
        "Image of [[a, b], [c, d]] (given as a, b, c, d) in the d-dimensional irreducible representation.");
  m.def("veronese", [](double x, int d) { return veronese(point(x), d).basis(); }, py::arg("x"), py::arg("d"),
        "Adapted basis of the osculating flag at x (inf allowed).");
  m.def("is_positive_tuple",
        [](const std::vector<Mat>& bases) {
          std::vector<Flag> flags;
          for (const auto& b : bases) flags.emplace_back(b);
          auto v = is_positive_tuple(flags);
          return py::make_tuple(v.positive, v.margin);
        },
        py::arg("bases"), "Positivity of a cyclic tuple of flags given by adapted bases; returns (positive, margin).");
  m.def("singular_gaps",
        [](const std::vector<std::array<double, 4>>& gens, int d, int length, bool orthonormal) {
          auto g = moebius_list(gens);
          auto ball = enumerate_ball(g, length);
          auto samples = gap_samples(Representation::tau(g, d, orthonormal), ball);
          py::list out;
          for (const auto& s : samples) out.append(py::make_tuple(s.word.str(), s.displacement, s.log_singular_gap));
          return out;
        },
        py::arg("generators"), py::arg("d"), py::arg("length"), py::arg("orthonormal") = true,
        "(word, displacement, log singular gaps) for every word of the ball under tau_d.");
  m.def("run",
        [](const std::string& command, const std::string& config_path, const std::string& out) {
          auto cmd = parse_command(command);
          if (!cmd) throw Error("unknown command " + command);
          RunOptions opt;
          opt.out = out;
          RunResult r = run_command(*cmd, load_config(config_path), opt);
          return py::make_tuple(r.exit_code, r.report.dump());
        },
        py::arg("command"), py::arg("config"), py::arg("out") = "",
        "Runs a command on a config file; returns (exit_code, report as JSON text).");
  m.def("fnv1a_hex", &fnv1a_hex);
}
