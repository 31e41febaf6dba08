// python/bindings.cpp

// Copyright 2026  ARN contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "arn/checkpoint.hpp"
#include "arn/error.hpp"
#include "arn/losses.hpp"
#include "arn/mixing.hpp"
#include "arn/model.hpp"
#include "arn/train.hpp"
#include "arn/wav.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

std::span<const float> as_span(const FloatArray& a) {
  if (a.ndim() != 1) throw arn::DimensionError("expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<float> to_array(const std::vector<float>& v) {
  return py::array_t<float>(static_cast<py::ssize_t>(v.size()), v.data());
}

class PyModel {
 public:
  explicit PyModel(arn::Checkpoint c) : ckpt_(std::move(c)) {}

  static PyModel load(const std::filesystem::path& path) { return PyModel(arn::load_checkpoint(path)); }

  static PyModel init(const arn::ArnConfig& cfg, std::uint64_t seed, bool zero) {
    cfg.validate();
    arn::Checkpoint c;
    c.config = cfg;
    c.params = zero ? arn::ModelParams<float>::zeros(cfg) : arn::ModelParams<float>::init(cfg, seed);
    return PyModel(std::move(c));
  }

  py::array_t<float> enhance(const FloatArray& noisy) const {
    const auto x = as_span(noisy);
    std::vector<float> y;
    {
      py::gil_scoped_release release;
      y = arn::Model<float>{ckpt_.config, ckpt_.params}.enhance(x);
    }
    return to_array(y);
  }

  void save(const std::filesystem::path& path) { arn::save_checkpoint(ckpt_, path); }

  const arn::ArnConfig& config() const { return ckpt_.config; }
  std::size_t parameter_count() const { return ckpt_.params.parameter_count(); }
  std::size_t epoch() const { return ckpt_.epoch; }
  double best_validation_score() const { return ckpt_.best_validation_score; }

 private:
  arn::Checkpoint ckpt_;
};

}  // namespace

PYBIND11_MODULE(_arn, m) {
  m.doc() = "Attentive recurrent network for time-domain speech enhancement";

  auto base = py::register_exception<arn::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<arn::DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<arn::ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<arn::ConfigurationError>(m, "ConfigurationError", base.ptr());
  py::register_exception<arn::DegenerateSignalError>(m, "DegenerateSignalError", base.ptr());
  py::register_exception<arn::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<arn::CompatibilityError>(m, "CompatibilityError", base.ptr());
  auto ckpt = py::register_exception<arn::CheckpointError>(m, "CheckpointError", base.ptr());
  py::register_exception<arn::CorruptHeaderError>(m, "CorruptHeaderError", ckpt.ptr());
  py::register_exception<arn::ShapeMismatchError>(m, "ShapeMismatchError", ckpt.ptr());
  py::register_exception<arn::TruncatedPayloadError>(m, "TruncatedPayloadError", ckpt.ptr());

  py::class_<arn::ArnConfig>(m, "ArnConfig")
      .def(py::init<>())
      .def_readwrite("hidden", &arn::ArnConfig::hidden)
      .def_readwrite("input_frame", &arn::ArnConfig::input_frame)
      .def_readwrite("output_frame", &arn::ArnConfig::output_frame)
      .def_readwrite("shift", &arn::ArnConfig::shift)
      .def_readwrite("num_blocks", &arn::ArnConfig::num_blocks)
      .def_readwrite("causal", &arn::ArnConfig::causal)
      .def_readwrite("dropout", &arn::ArnConfig::dropout)
      .def_readwrite("layer_norm_eps", &arn::ArnConfig::layer_norm_eps)
      .def_static("causal_default", &arn::ArnConfig::causal_default)
      .def_static("noncausal_default", &arn::ArnConfig::noncausal_default)
      .def("validate", &arn::ArnConfig::validate)
      .def("parameter_count", [](const arn::ArnConfig& c) { return arn::expected_parameter_count(c); })
      .def("__eq__", [](const arn::ArnConfig& a, const arn::ArnConfig& b) { return a == b; })
      .def("__repr__", [](const arn::ArnConfig& c) {
        std::string s = "ArnConfig(";
        bool first = true;
        for (const auto& [k, v] : arn::config_fields(c)) {
          s += (first ? "" : ", ") + k + "=" + v;
          first = false;
        }
        return s + ")";
      });

  py::class_<PyModel>(m, "Model")
      .def_static("load", &PyModel::load, py::arg("path"))
      .def_static("init", &PyModel::init, py::arg("config"), py::arg("seed") = 0,
                  py::arg("zero") = false)
      .def("enhance", &PyModel::enhance, py::arg("noisy"),
           "Enhanced waveform with the same length as `noisy`.")
      .def("save", &PyModel::save, py::arg("path"))
      .def_property_readonly("config", &PyModel::config)
      .def_property_readonly("parameter_count", &PyModel::parameter_count)
      .def_property_readonly("epoch", &PyModel::epoch)
      .def_property_readonly("best_validation_score", &PyModel::best_validation_score);

  m.def("snr_db", [](const FloatArray& c, const FloatArray& e) { return arn::snr_db(as_span(c), as_span(e)); },
        py::arg("clean"), py::arg("estimate"));
  m.def("si_snr_db",
        [](const FloatArray& c, const FloatArray& e) { return arn::si_snr_db(as_span(c), as_span(e)); },
        py::arg("clean"), py::arg("estimate"));

  m.def(
      "make_mixture",
      [](const FloatArray& speech, const FloatArray& noise, int snr_db, std::size_t noise_offset) {
        const auto s = as_span(speech), n = as_span(noise);
        arn::MixtureRecipe r;
        r.snr_db = snr_db;
        r.noise_offset = noise_offset;
        r.length = s.size();
        const auto pair = arn::make_mixture(r, s, n);
        return py::make_tuple(to_array(pair.noisy), to_array(pair.clean));
      },
      py::arg("speech"), py::arg("noise"), py::arg("snr_db"), py::arg("noise_offset") = 0,
      "Returns (noisy, clean) scaled so the mixture has unit RMS.");
  m.def(
      "trim_silence",
      [](const FloatArray& x, double threshold_db) { return to_array(arn::trim_silence(as_span(x), threshold_db)); },
      py::arg("x"), py::arg("threshold_db") = -40.0);

  m.def("read_wav", [](const std::filesystem::path& p) { return to_array(arn::read_wav(p).samples); },
        py::arg("path"));
  m.def(
      "write_wav",
      [](const std::filesystem::path& p, const FloatArray& x, bool pcm16) {
        arn::write_wav(p, as_span(x), pcm16 ? arn::WavEncoding::Pcm16 : arn::WavEncoding::Float32);
      },
      py::arg("path"), py::arg("samples"), py::arg("pcm16") = false);

  m.def(
      "lr_schedule",
      [](std::size_t epoch, std::size_t epochs, double lr_hi, double lr_lo, std::size_t knee) {
        arn::TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.lr_hi = lr_hi;
        cfg.lr_lo = lr_lo;
        cfg.lr_knee = knee;
        return arn::lr_schedule(epoch, cfg);
      },
      py::arg("epoch"), py::arg("epochs") = 100, py::arg("lr_hi") = 2e-4, py::arg("lr_lo") = 2e-5,
      py::arg("knee") = 33);
}
