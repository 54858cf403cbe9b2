#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavecast/dataset.hpp"
#include "wavecast/denoise.hpp"
#include "wavecast/errors.hpp"
#include "wavecast/evaluate.hpp"
#include "wavecast/filter_bank.hpp"
#include "wavecast/lstm.hpp"
#include "wavecast/svr.hpp"
#include "wavecast/transform.hpp"

namespace py = pybind11;
using namespace wavecast;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols())
      throw ShapeError("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    rows[r].assign(m.row(r).begin(), m.row(r).end());
  return rows;
}

KernelSpec make_kernel(const std::string& kind, int degree, double scale,
                       std::size_t feature_count) {
  if (kind == "polynomial") return KernelSpec::polynomial(degree);
  if (kind == "gaussian") return KernelSpec::gaussian(scale);
  if (kind == "linear") return KernelSpec::linear();
  return kernel_preset(kind, feature_count);  // preset names work too
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "4-band wavelet transform, universal-threshold denoising and "
            "SVR/LSTM forecasting";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  // filter bank
  py::class_<FilterBank>(m, "FilterBank")
      .def_readonly("alpha", &FilterBank::alpha)
      .def_readonly("beta", &FilterBank::beta)
      .def_readonly("gamma", &FilterBank::gamma)
      .def_readonly("delta", &FilterBank::delta);
  m.def("default_filter_bank", &default_filter_bank);
  m.def("paper_verbatim_filter_bank", &paper_verbatim_filter_bank);
  m.def(
      "validate_filter_bank",
      [](const FilterBank& fb, double tolerance) {
        const ValidationReport rep = validate_filter_bank(fb, tolerance);
        py::list out;
        for (const auto& c : rep.conditions)
          out.append(py::make_tuple(c.name, c.residual, c.pass));
        return out;
      },
      py::arg("bank"), py::arg("tolerance") = 1e-9,
      "List of (condition, residual, pass) tuples");

  // transform
  m.def("build_transform_matrix",
        [](const FilterBank& fb, std::size_t n) {
          return from_matrix(build_transform_matrix(fb, n));
        },
        py::arg("bank"), py::arg("n"));
  m.def(
      "forward_transform",
      [](const FilterBank& fb, const std::vector<double>& s) {
        WaveletCoefficients c = forward_transform(fb, s);
        return py::make_tuple(c.approx, c.d1, c.d2, c.d3);
      },
      py::arg("bank"), py::arg("signal"),
      "Returns (approx, d1, d2, d3)");
  m.def(
      "inverse_transform",
      [](const FilterBank& fb, const std::vector<double>& a,
         const std::vector<double>& d1, const std::vector<double>& d2,
         const std::vector<double>& d3) {
        WaveletCoefficients c{a, d1, d2, d3};
        return inverse_transform(fb, c);
      },
      py::arg("bank"), py::arg("approx"), py::arg("d1"), py::arg("d2"),
      py::arg("d3"));
  m.def(
      "multilevel_transform",
      [](const FilterBank& fb, const std::vector<double>& s, std::size_t levels) {
        return multilevel_transform(fb, s, levels).flatten();
      },
      py::arg("bank"), py::arg("signal"), py::arg("levels") = 1,
      "Flattened coefficients: [a^L, d1^L, d2^L, d3^L, ..., d1^1, d2^1, d3^1]");
  m.def(
      "inverse_multilevel",
      [](const FilterBank& fb, const std::vector<double>& flat, std::size_t levels) {
        return inverse_multilevel(fb, MultilevelCoefficients::from_flat(flat, levels));
      },
      py::arg("bank"), py::arg("flat"), py::arg("levels"));
  m.def(
      "project_components",
      [](const FilterBank& fb, const std::vector<double>& s) {
        SignalComponents c = project_components(fb, s);
        return py::make_tuple(c.approx, c.d1, c.d2, c.d3);
      },
      py::arg("bank"), py::arg("signal"), "Returns (A1, D1, D2, D3)");

  // denoise
  m.def("estimate_sigma",
        [](const std::vector<double>& band) { return estimate_sigma(band); },
        py::arg("band"));
  m.def("universal_threshold", &universal_threshold, py::arg("sigma"),
        py::arg("n_elems"));
  m.def("hard_threshold",
        [](const std::vector<double>& band, double lam) {
          return hard_threshold(band, lam);
        },
        py::arg("band"), py::arg("lambda_"));
  m.def(
      "denoise_signal",
      [](const FilterBank& fb, const std::vector<double>& s, std::size_t levels) {
        DenoiseResult r = denoise_signal(fb, s, levels);
        py::list plan;
        for (const auto& b : r.plan.bands) {
          py::dict d;
          d["level"] = b.level;
          d["band"] = b.band;
          d["sigma"] = b.sigma;
          d["lambda"] = b.lambda;
          d["band_size"] = b.band_size;
          d["zeroed"] = b.zeroed;
          plan.append(d);
        }
        return py::make_tuple(r.signal, plan);
      },
      py::arg("bank"), py::arg("signal"), py::arg("levels") = 1,
      "Returns (denoised_signal, threshold_plan)");

  // svr
  py::class_<SvrModel>(m, "SvrModel")
      .def("predict",
           [](const SvrModel& model, const std::vector<double>& x) {
             return svr_predict(model, x);
           })
      .def_property_readonly("bias", [](const SvrModel& m_) { return m_.bias; })
      .def_property_readonly("dual_coeffs",
                             [](const SvrModel& m_) { return m_.dual_coeffs; })
      .def_property_readonly("converged",
                             [](const SvrModel& m_) { return m_.converged; })
      .def_property_readonly("epsilon",
                             [](const SvrModel& m_) { return m_.epsilon; })
      .def_property_readonly("dual_objective",
                             [](const SvrModel& m_) { return m_.dual_objective; })
      .def("to_json", &SvrModel::to_json)
      .def_static("from_json", &SvrModel::from_json);
  m.def(
      "kernel_eval",
      [](const std::string& kind, const std::vector<double>& x,
         const std::vector<double>& y, int degree, double scale) {
        return kernel_eval(make_kernel(kind, degree, scale, x.size()), x, y);
      },
      py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("degree") = 2,
      py::arg("scale") = 1.0);
  m.def(
      "train_svr",
      [](const std::vector<std::vector<double>>& x, const std::vector<double>& y,
         const std::string& kernel, int degree, double scale, double c,
         std::optional<double> epsilon, double tolerance,
         std::size_t max_iterations) {
        Matrix xm = to_matrix(x);
        SvrHyperParams hyper;
        hyper.c = c;
        hyper.epsilon = epsilon;
        hyper.tolerance = tolerance;
        hyper.max_iterations = max_iterations;
        return train_svr(xm, y, make_kernel(kernel, degree, scale, xm.cols()),
                         hyper);
      },
      py::arg("x"), py::arg("y"), py::arg("kernel") = "linear",
      py::arg("degree") = 2, py::arg("scale") = 1.0, py::arg("c") = 1.0,
      py::arg("epsilon") = std::nullopt, py::arg("tolerance") = 1e-3,
      py::arg("max_iterations") = 100000);

  // lstm
  py::class_<LstmParams>(m, "LstmParams")
      .def_property_readonly("hidden", [](const LstmParams& p) { return p.hidden; })
      .def_property_readonly("input", [](const LstmParams& p) { return p.input; })
      .def("to_json", &LstmParams::to_json)
      .def_static("from_json", &LstmParams::from_json);
  m.def(
      "lstm_step",
      [](const LstmParams& p, const std::vector<double>& x,
         const std::vector<double>& cell, const std::vector<double>& output) {
        LstmState s{cell, output};
        LstmState next = lstm_step(p, x, s);
        return py::make_tuple(next.output, next.cell);
      },
      py::arg("params"), py::arg("x"), py::arg("cell"), py::arg("output"),
      "Returns (y, c)");
  m.def("lstm_params_init", &LstmParams::init, py::arg("hidden"), py::arg("input"),
        py::arg("seed"));
  m.def(
      "lstm_forward",
      [](const LstmParams& p, const std::vector<std::vector<double>>& steps) {
        return lstm_forward(p, to_matrix(steps));
      },
      py::arg("params"), py::arg("steps"));
  m.def(
      "train_lstm",
      [](const std::vector<std::vector<std::vector<double>>>& sequences,
         const std::vector<double>& targets, std::size_t hidden_size,
         double learning_rate, std::size_t epochs, double clip_norm,
         std::uint64_t seed) {
        if (sequences.size() != targets.size())
          throw ShapeError("sequences/targets length mismatch");
        std::vector<LstmSequence> data(sequences.size());
        for (std::size_t i = 0; i < sequences.size(); ++i)
          data[i] = {to_matrix(sequences[i]), targets[i]};
        LstmTrainConfig cfg{hidden_size, learning_rate, epochs, clip_norm, seed};
        LstmTrainResult r = train_lstm(data, cfg);
        return py::make_tuple(std::move(r.params), r.loss_history);
      },
      py::arg("sequences"), py::arg("targets"), py::arg("hidden_size") = 8,
      py::arg("learning_rate") = 0.01, py::arg("epochs") = 100,
      py::arg("clip_norm") = 1.0, py::arg("seed") = 42,
      "Returns (params, loss_history)");
  m.def(
      "lstm_forecast",
      [](const LstmParams& p, const std::vector<std::vector<double>>& steps) {
        return lstm_forecast(p, to_matrix(steps));
      },
      py::arg("params"), py::arg("steps"));

  // metrics and the comparison harness
  m.def("rmse",
        [](const std::vector<double>& p, const std::vector<double>& a) {
          return rmse(p, a);
        });
  m.def("mae",
        [](const std::vector<double>& p, const std::vector<double>& a) {
          return mae(p, a);
        });
  m.def("r_squared",
        [](const std::vector<double>& p, const std::vector<double>& a) {
          return r_squared(p, a);
        });
  m.def(
      "recursive_forecast",
      [](const std::function<double(std::vector<double>)>& predict,
         const std::vector<std::vector<double>>& window, std::size_t target_column,
         std::size_t horizon) {
        OneStepPredictor wrapped = [&](std::span<const double> f) {
          return predict(std::vector<double>(f.begin(), f.end()));
        };
        return recursive_forecast(wrapped, to_matrix(window), target_column,
                                  horizon);
      },
      py::arg("predict"), py::arg("window"), py::arg("target_column") = 0,
      py::arg("horizon") = 1);
  m.def(
      "run_comparison",
      [](const std::string& config_json) {
        return run_comparison(ComparisonConfig::from_json(config_json)).to_json();
      },
      py::arg("config_json"), "Takes and returns JSON text");
}
