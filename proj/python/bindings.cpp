#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tfop/gaussians.hpp"
#include "tfop/harness.hpp"

namespace py = pybind11;
using namespace tfop;

namespace {

py::array_t<std::complex<double>> values_array(const std::vector<cd>& values,
                                               const std::vector<py::ssize_t>& shape) {
    py::array_t<std::complex<double>> out(shape);
    std::copy(values.begin(), values.end(), out.mutable_data());
    return out;
}

std::vector<py::ssize_t> grid_shape(const GridSpec& g) {
    return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim), g.points_per_axis);
}

SampledFunction function_from_array(const GridSpec& g, Domain domain,
                                    const py::array_t<std::complex<double>>& arr) {
    SampledFunction f(g, domain);
    if (static_cast<std::size_t>(arr.size()) != f.values.size())
        throw config_error("values array size does not match the grid");
    auto buf = arr.request();
    const auto* data = static_cast<const std::complex<double>*>(buf.ptr);
    std::copy(data, data + arr.size(), f.values.begin());
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "time-frequency operator toolkit";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

    py::enum_<Domain>(m, "Domain")
        .value("space", Domain::space)
        .value("frequency", Domain::frequency);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<int, double, int>(), py::arg("dim"), py::arg("half_width"),
             py::arg("points_per_axis"))
        .def_static("self_dual", &GridSpec::self_dual, py::arg("dim"),
                    py::arg("points_per_axis"))
        .def_readonly("dim", &GridSpec::dim)
        .def_readonly("half_width", &GridSpec::half_width)
        .def_readonly("points_per_axis", &GridSpec::points_per_axis)
        .def("spacing", &GridSpec::spacing)
        .def("freq_step", &GridSpec::freq_step)
        .def("is_self_dual", &GridSpec::is_self_dual, py::arg("rel_tol") = 1e-9)
        .def("coord", &GridSpec::coord)
        .def("freq", &GridSpec::freq);

    py::class_<SampledFunction>(m, "SampledFunction")
        .def(py::init([](const GridSpec& g, const py::array_t<std::complex<double>>& arr,
                         Domain domain) { return function_from_array(g, domain, arr); }),
             py::arg("grid"), py::arg("values"), py::arg("domain") = Domain::space)
        .def_readonly("grid", &SampledFunction::grid)
        .def_readonly("domain", &SampledFunction::domain)
        .def_property_readonly("values", [](const SampledFunction& f) {
            return values_array(f.values, grid_shape(f.grid));
        });

    m.def("gaussian", [](const GridSpec& g, std::vector<double> center,
                         std::vector<double> spread, std::vector<double> modulation,
                         double amplitude) {
              GaussianAmplitude ga;
              ga.center = std::move(center);
              ga.spread = std::move(spread);
              ga.modulation = std::move(modulation);
              ga.amplitude = amplitude;
              return ga.sample_on(g);
          },
          py::arg("grid"), py::arg("center"), py::arg("spread"),
          py::arg("modulation") = std::vector<double>{}, py::arg("amplitude") = 1.0);

    m.def("forward_dft", &forward_dft);
    m.def("inverse_dft", &inverse_dft);
    m.def("quadrature_integral", &quadrature_integral);
    m.def("l2_norm", &l2_norm);

    py::class_<WeightSpec>(m, "WeightSpec")
        .def_static("one", &WeightSpec::one, py::arg("dim"))
        .def_static("bracket", &WeightSpec::bracket, py::arg("dim"), py::arg("axes"),
                    py::arg("exponent"))
        .def("eval", &WeightSpec::eval);

    py::class_<WindowSpec>(m, "WindowSpec")
        .def_static("gaussian", &WindowSpec::gaussian, py::arg("grid"), py::arg("spread"))
        .def_static("bump", &WindowSpec::bump, py::arg("grid"), py::arg("radius"))
        .def_property_readonly("values",
                               [](const WindowSpec& w) {
                                   return values_array(w.values.values, grid_shape(w.grid));
                               })
        .def("l2", &WindowSpec::l2);

    py::class_<StftArray>(m, "StftArray")
        .def_readonly("grid", &StftArray::grid)
        .def_property_readonly("values", [](const StftArray& V) {
            const py::ssize_t P = static_cast<py::ssize_t>(V.position_count());
            return values_array(V.values, {P, P});
        });

    m.def("stft",
          [](const SampledFunction& f, const WindowSpec& chi, double window_tol) {
              return stft(f, chi, window_tol);
          },
          py::arg("f"), py::arg("window"), py::arg("window_tol") = 1e-12);
    m.def("istft",
          [](const StftArray& V, const WindowSpec& chi) { return istft(V, chi); },
          py::arg("V"), py::arg("window"));
    m.def("modulation_norm", &modulation_norm, py::arg("V"), py::arg("p"), py::arg("q"),
          py::arg("omega"));
    m.def("h_profile", &h_profile, py::arg("f"), py::arg("window"), py::arg("omega"),
          py::arg("p"), py::arg("window_tol") = 1e-12);

    py::class_<PhaseSpec>(m, "PhaseSpec")
        .def_static("bilinear", &PhaseSpec::bilinear, py::arg("n"));

    py::enum_<DetBlock>(m, "DetBlock")
        .value("full", DetBlock::full)
        .value("yz", DetBlock::yz)
        .value("xz", DetBlock::xz)
        .value("zz", DetBlock::zz);

    m.def("nondegeneracy", &nondegeneracy, py::arg("phase"), py::arg("grid"), py::arg("block"));

    py::class_<OperatorMatrix>(m, "OperatorMatrix")
        .def_property_readonly("matrix",
                               [](const OperatorMatrix& T) {
                                   py::array_t<std::complex<double>> out(
                                       {static_cast<py::ssize_t>(T.entries.rows()),
                                        static_cast<py::ssize_t>(T.entries.cols())});
                                   for (Eigen::Index i = 0; i < T.entries.rows(); ++i)
                                       for (Eigen::Index j = 0; j < T.entries.cols(); ++j)
                                           out.mutable_at(i, j) = T.entries(i, j);
                                   return out;
                               })
        .def("apply", &OperatorMatrix::apply);

    m.def("op_fio", &op_fio, py::arg("amplitude"), py::arg("phase"),
          py::arg("fitness_tol") = 1e-10);
    m.def("fio_kernel", &fio_kernel, py::arg("amplitude"), py::arg("phase"),
          py::arg("fitness_tol") = 1e-10);
    m.def("lift_amplitude_xz", &lift_amplitude_xz, py::arg("amplitude"), py::arg("n1"));
    m.def("apply_kernel", &apply_kernel, py::arg("kernel"), py::arg("f"));
    m.def("op_pseudo", &op_pseudo, py::arg("symbol"), py::arg("t"));
    m.def("quantization_transfer", &quantization_transfer, py::arg("symbol"), py::arg("s"),
          py::arg("t"));
    m.def("op_fio_rotated", &op_fio_rotated, py::arg("amplitude"), py::arg("phase"),
          py::arg("t1"), py::arg("t2"), py::arg("fitness_tol") = 1e-10);
    m.def("gaussian_identity_check", &gaussian_identity_check, py::arg("t_values"),
          py::arg("grid"));

    py::class_<SingularSpectrum>(m, "SingularSpectrum")
        .def_readonly("values", &SingularSpectrum::values);

    m.def("singular_values",
          [](const OperatorMatrix& T) { return singular_values(T); }, py::arg("T"));
    m.def("schatten_norm", &schatten_norm, py::arg("spectrum"), py::arg("p"));
    m.def("interpolation_audit", &interpolation_audit, py::arg("T"), py::arg("p1"),
          py::arg("p2"), py::arg("theta"));
    m.def("hs_kernel_identity", &hs_kernel_identity, py::arg("kernel"));

    m.def("run_experiment_json",
          [](const std::string& config_json) {
              const ExperimentConfig cfg = ExperimentConfig::from_json_text(config_json);
              return report_to_json(run_experiment(cfg));
          },
          py::arg("config_json"));
    m.def("default_config_json", [](const std::string& experiment) {
        return ExperimentConfig::defaults(experiment).canonical_json();
    });

    m.attr("inf") = std::numeric_limits<double>::infinity();
}
