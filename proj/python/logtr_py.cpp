#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "logtr/errors.hpp"
#include "logtr/experiment.hpp"
#include "logtr/tnsr.hpp"

namespace py = pybind11;
using namespace logtr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Tensors use row-major storage, so a C-contiguous float64 array maps onto them directly.
Tensor to_tensor(const Array& a) {
  if (a.ndim() == 0) throw ShapeError("expected an array with at least one axis");
  Dims dims(a.shape(), a.shape() + a.ndim());
  return Tensor(dims, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  Array out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  Matrix m(a.shape(0), a.shape(1));
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = a.at(r, c);
  return m;
}

Array from_matrix(const Matrix& m) {
  Array out({m.rows(), m.cols()});
  auto v = out.mutable_unchecked<2>();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return out;
}

TRFactors to_factors(const std::vector<Array>& cores) {
  if (cores.size() != 3) throw ShapeError("a tensor ring needs exactly three cores");
  TRFactors f;
  for (std::size_t n = 0; n < 3; ++n) f.cores[n] = to_tensor(cores[n]);
  f.validate();
  return f;
}

std::vector<Array> from_factors(const TRFactors& f) {
  return {to_array(f.cores[0]), to_array(f.cores[1]), to_array(f.cores[2])};
}

py::dict report_dict(const MetricsReport& m) {
  py::dict d;
  d["psnr"] = m.psnr;
  d["ssim"] = m.ssim;
  d["ergas"] = m.ergas;
  d["sam"] = m.sam;
  d["uiqi"] = m.uiqi;
  d["band_psnr"] = m.band_psnr;
  d["band_uiqi"] = m.band_uiqi;
  d["sam_skipped"] = m.sam_skipped;
  return d;
}

py::dict result_dict(const FusionResult& r) {
  py::dict d;
  d["fused"] = to_array(r.fused);
  d["cores"] = from_factors(r.cores);
  d["initial_objective"] = r.initial_objective;
  py::list history;
  for (const auto& h : r.history) {
    py::dict row;
    row["k"] = h.k;
    row["objective"] = h.objective;
    row["rel_change"] = h.rel_change;
    row["seconds"] = h.seconds;
    history.append(row);
  }
  d["history"] = history;
  d["converged"] = r.converged;
  return d;
}

BlurSpec blur_from(const std::string& kind, std::size_t size, double sigma) {
  if (kind == "gaussian") return BlurSpec::gaussian(size, sigma);
  if (kind == "delta") return BlurSpec::delta();
  throw ValueError("blur kind must be 'gaussian' or 'delta', got '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperspectral/multispectral fusion with a logarithmic low-rank tensor-ring model";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ValueError>(m, "ValueError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<TnsrError>(m, "TnsrError", PyExc_IOError);

  m.attr("__version__") = version_string().substr(std::string("logtr ").size());

  m.def(
      "compose", [](const std::vector<Array>& cores) { return to_array(compose(to_factors(cores))); },
      py::arg("cores"), "Full tensor of a three-core ring; cores are (R_n, I_n, R_{n+1}) arrays.");
  m.def(
      "tr_svd",
      [](const Array& x, const Ranks& ranks) { return from_factors(tr_svd_init(to_tensor(x), ranks)); },
      py::arg("x"), py::arg("ranks"));
  m.def(
      "random_cores",
      [](const Dims& dims, const Ranks& ranks, std::uint64_t seed) { return from_factors(random_init(dims, ranks, seed)); },
      py::arg("dims"), py::arg("ranks"), py::arg("seed") = 0);
  m.def(
      "phantom_cores",
      [](const Dims& dims, const Ranks& ranks, std::uint64_t seed) { return from_factors(make_phantom(dims, ranks, seed)); },
      py::arg("dims"), py::arg("ranks"), py::arg("seed") = 0);
  m.def(
      "mode_product", [](const Array& x, const Array& mat, std::size_t mode) {
        return to_array(mode_n_product(to_tensor(x), to_matrix(mat), mode));
      },
      py::arg("x"), py::arg("matrix"), py::arg("mode"));

  py::class_<DegradationModel>(m, "Degradation")
      .def(py::init([](const Dims& dims, std::size_t factor, std::size_t bands, const std::string& blur,
                       std::size_t size, double sigma) {
             if (dims.size() != 3) throw ShapeError("dims must have three extents");
             return make_degradation(dims, factor, blur_from(blur, size, sigma),
                                     build_spectral_operator(dims[2], contiguous_groups(dims[2], bands)));
           }),
           py::arg("dims"), py::arg("factor") = 4, py::arg("bands") = 4, py::arg("blur") = "gaussian",
           py::arg("size") = 7, py::arg("sigma") = 2.0)
      .def_property_readonly("width_op", [](const DegradationModel& d) { return from_matrix(d.width_op); })
      .def_property_readonly("height_op", [](const DegradationModel& d) { return from_matrix(d.height_op); })
      .def_property_readonly("spectral_op", [](const DegradationModel& d) { return from_matrix(d.spectral_op); })
      .def_readonly("factor", &DegradationModel::factor)
      .def(
          "degrade",
          [](const DegradationModel& d, const Array& x) {
            const Observations o = degrade(to_tensor(x), d);
            return py::make_tuple(to_array(o.lr_hsi), to_array(o.hr_msi));
          },
          py::arg("x"), "Returns (lr_hsi, hr_msi).");

  m.def(
      "add_noise", [](const Array& x, double snr_db, std::uint64_t seed) { return to_array(add_noise(to_tensor(x), snr_db, seed)); },
      py::arg("x"), py::arg("snr_db"), py::arg("seed") = 0);

  m.def("log_threshold", [](double s, double t, double eps) { return log_threshold_scalar(s, t, eps); },
        py::arg("s"), py::arg("t"), py::arg("eps"));
  m.def(
      "ltnn", [](const Array& g, double eps) { return ltnn_value(to_tensor(g), eps); }, py::arg("g"),
      py::arg("eps") = 1e-2);
  m.def(
      "ltnn_prox", [](const Array& a, double t, double eps) { return to_array(ltnn_prox(to_tensor(a), t, eps)); },
      py::arg("a"), py::arg("t"), py::arg("eps") = 1e-2);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("ranks", &SolverConfig::ranks)
      .def_readwrite("lambda_", &SolverConfig::lambda)
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("mu", &SolverConfig::mu)
      .def_readwrite("eps_log", &SolverConfig::eps_log)
      .def_readwrite("varsigma", &SolverConfig::varsigma)
      .def_readwrite("k_max", &SolverConfig::k_max)
      .def_readwrite("inner_max", &SolverConfig::inner_max)
      .def_readwrite("inner_tol", &SolverConfig::inner_tol)
      .def_readwrite("cg_tol", &SolverConfig::cg_tol)
      .def_readwrite("cg_max", &SolverConfig::cg_max)
      .def_readwrite("stop_tol", &SolverConfig::stop_tol)
      .def_readwrite("monotone", &SolverConfig::monotone);

  m.def(
      "solve",
      [](const Array& y, const Array& z, const DegradationModel& model, const SolverConfig& cfg) {
        const Tensor ty = to_tensor(y), tz = to_tensor(z);
        FusionResult r;
        {
          py::gil_scoped_release release;
          r = solve(ty, tz, model, cfg);
        }
        return result_dict(r);
      },
      py::arg("y"), py::arg("z"), py::arg("model"), py::arg("config") = SolverConfig{});

  m.def(
      "metrics",
      [](const Array& ref, const Array& est, double factor) { return report_dict(evaluate(to_tensor(ref), to_tensor(est), factor)); },
      py::arg("ref"), py::arg("est"), py::arg("factor") = 4.0, "Metric report; inputs are expected on a [0, 255] scale.");
  m.def("psnr", [](const Array& r, const Array& e) { return psnr(to_tensor(r), to_tensor(e)); });
  m.def("ssim", [](const Array& r, const Array& e) { return ssim(to_tensor(r), to_tensor(e)); });
  m.def("sam", [](const Array& r, const Array& e) { return sam(to_tensor(r), to_tensor(e)); });
  m.def("ergas", [](const Array& r, const Array& e, double d) { return ergas(to_tensor(r), to_tensor(e), d); });
  m.def("uiqi", [](const Array& r, const Array& e, std::size_t w) { return uiqi(to_tensor(r), to_tensor(e), w); },
        py::arg("ref"), py::arg("est"), py::arg("window") = 32);

  m.def(
      "read_tnsr", [](const std::filesystem::path& p) { return to_array(read_tnsr(p)); }, py::arg("path"));
  m.def(
      "write_tnsr", [](const std::filesystem::path& p, const Array& x) { write_tnsr(p, to_tensor(x)); },
      py::arg("path"), py::arg("x"));

  m.def(
      "run_config",
      [](const std::string& json_text) {
        const ExperimentConfig cfg = parse_config(json_text);
        cfg.validate();
        const Problem p = prepare_problem(cfg);
        FuseOutcome o;
        {
          py::gil_scoped_release release;
          o = run_fusion(p, cfg);
        }
        py::dict d = result_dict(o.result);
        d["metrics"] = o.metrics ? py::object(report_dict(*o.metrics)) : py::none();
        d["baseline"] = o.baseline ? py::object(report_dict(*o.baseline)) : py::none();
        return d;
      },
      py::arg("config_json"), "Prepare and fuse the problem described by a JSON experiment config.");
}
