#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "keygest/density_peaks.hpp"
#include "keygest/descriptors.hpp"
#include "keygest/entropy.hpp"
#include "keygest/error.hpp"
#include "keygest/fusion.hpp"
#include "keygest/keyframes.hpp"
#include "keygest/pipeline.hpp"
#include "keygest/sequence_io.hpp"

namespace py = pybind11;
using namespace keygest;

namespace {

using Bytes = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Frame to_frame(const Bytes& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "frame must be a 2-D (height, width) array");
  const auto* p = a.data();
  return Frame(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::vector<std::uint8_t>(p, p + a.size()));
}

FrameSequence to_sequence(const Bytes& a, std::string source_id = {}) {
  if (a.ndim() != 3) throw Error(ErrorCode::InvalidArgument, "sequence must be a 3-D (frames, height, width) array");
  const auto t = a.shape(0), h = a.shape(1), w = a.shape(2);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(t));
  for (py::ssize_t k = 0; k < t; ++k) {
    const auto* p = a.data(k, 0, 0);
    frames.emplace_back(static_cast<int>(w), static_cast<int>(h), std::vector<std::uint8_t>(p, p + h * w));
  }
  return FrameSequence(std::move(frames), std::move(source_id));
}

Bytes to_array(const FrameSequence& seq) {
  const auto t = static_cast<py::ssize_t>(seq.size());
  const auto h = static_cast<py::ssize_t>(seq.front().height());
  const auto w = static_cast<py::ssize_t>(seq.front().width());
  Bytes out({t, h, w});
  for (py::ssize_t k = 0; k < t; ++k) {
    const auto px = seq[static_cast<std::size_t>(k)].pixels();
    std::copy(px.begin(), px.end(), out.mutable_data(k, 0, 0));
  }
  return out;
}

KeyFrameOptions keyframe_options(std::size_t n, const std::string& kernel, std::optional<double> dc) {
  return {n, parse_kernel(kernel), dc};
}

py::dict peaks_dict(const DensityPeaksResult& r) {
  std::vector<std::optional<std::size_t>> higher;
  for (std::size_t h : r.profile.nearest_higher) higher.push_back(h == kNoHigher ? std::nullopt : std::optional(h));
  py::dict d;
  d["dc"] = r.dc;
  d["rho"] = r.profile.rho;
  d["delta"] = r.profile.delta;
  d["nearest_higher"] = higher;
  d["order"] = r.profile.order;
  d["centers"] = r.clustering.centers;
  d["assignment"] = r.clustering.assignment;
  return d;
}

}  // namespace

PYBIND11_MODULE(_keygest, m) {
  m.doc() = "Entropy key frames, density-peaks clustering and fused appearance/motion gesture classification";

  py::register_exception<Error>(m, "KeygestError", PyExc_RuntimeError);

  m.def("image_entropy", [](const Bytes& frame) { return image_entropy(to_frame(frame)); }, py::arg("frame"),
        "Shannon entropy in bits of a (height, width) uint8 image.");
  m.def("entropy_curve", [](const Bytes& frames) { return entropy_curve(to_sequence(frames)).bits; }, py::arg("frames"),
        "Per-frame entropy of a (frames, height, width) uint8 array.");
  m.def(
      "local_extrema",
      [](std::vector<double> curve) {
        const ExtremeSet e = local_extrema(EntropyCurve{std::move(curve)});
        return py::make_tuple(e.indices(ExtremumKind::Maximum), e.indices(ExtremumKind::Minimum));
      },
      py::arg("curve"), "1-based (maxima, minima) of a curve with at least three values.");

  m.def(
      "density_peaks",
      [](const std::vector<std::pair<double, double>>& points, std::size_t n_centers, const std::string& kernel,
         std::optional<double> dc) {
        std::vector<Point2D> p;
        for (auto [x, y] : points) p.push_back({x, y});
        return peaks_dict(density_peaks(p, n_centers, parse_kernel(kernel), dc));
      },
      py::arg("points"), py::arg("n_centers"), py::arg("kernel") = "gaussian", py::arg("dc") = py::none());

  m.def(
      "extract_keyframes",
      [](const Bytes& frames, std::size_t n, const std::string& kernel, std::optional<double> dc) {
        const KeyFrameSet k = extract_keyframes(to_sequence(frames), keyframe_options(n, kernel, dc));
        py::dict d;
        d["indices"] = k.indices;
        d["fallback_used"] = k.fallback_used;
        return d;
      },
      py::arg("frames"), py::arg("n") = 5, py::arg("kernel") = "gaussian", py::arg("dc") = py::none(),
      "1-based key-frame indices of a (frames, height, width) uint8 array.");

  m.def(
      "lbp_top",
      [](const Bytes& frames) {
        const LbpTopHistogram h = lbp_top(to_grayscale_stack(to_sequence(frames)));
        return std::vector<double>(h.bins.begin(), h.bins.end());
      },
      py::arg("frames"), "Raw 177-bin LBP-TOP counts (XY, XT, YT blocks of 59).");
  m.def(
      "motion_feature", [](const Bytes& frames) { return LbpTopExtractor{}.extract(to_grayscale_stack(to_sequence(frames))); },
      py::arg("frames"), "Per-block normalised, square-rooted LBP-TOP feature.");

  m.def("fusion_weights", [](const std::vector<double>& r) { return fusion_weights(r).values; }, py::arg("accuracies"));
  m.def(
      "fuse",
      [](const std::vector<double>& h1, const std::vector<double>& h2, const std::vector<int>& w) {
        return fuse(h1, h2, FusionWeights{w});
      },
      py::arg("hist1"), py::arg("hist2"), py::arg("weights"));

  py::class_<PipelineConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("n_keyframes", &PipelineConfig::n_keyframes)
      .def_readwrite("dictionary_size", &PipelineConfig::dictionary_size)
      .def_property(
          "kernel", [](const PipelineConfig& c) { return std::string(to_string(c.kernel)); },
          [](PipelineConfig& c, const std::string& k) { c.kernel = parse_kernel(k); })
      .def_readwrite("dc", &PipelineConfig::dc)
      .def_readwrite("stride", &PipelineConfig::stride)
      .def_readwrite("appearance", &PipelineConfig::appearance)
      .def_readwrite("svm_c", &PipelineConfig::svm_c)
      .def_readwrite("svm_epochs", &PipelineConfig::svm_epochs)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("splits", &PipelineConfig::splits)
      .def_readwrite("train_fraction", &PipelineConfig::train_fraction)
      .def_readwrite("validation_fraction", &PipelineConfig::validation_fraction)
      .def_readwrite("test_fraction", &PipelineConfig::test_fraction)
      .def_readwrite("codebook_sample_cap", &PipelineConfig::codebook_sample_cap)
      .def("set", [](PipelineConfig& c, const std::string& key, const std::string& value) { apply_config_entry(c, key, value); })
      .def("validate", &PipelineConfig::validate)
      .def("__str__", &format_config)
      .def_static("load", [](const std::filesystem::path& p) { return load_config(p); });

  py::class_<LabeledDataset>(m, "Dataset")
      .def_readonly("class_names", &LabeledDataset::class_names)
      .def("__len__", [](const LabeledDataset& d) { return d.sequences.size(); })
      .def("frames", [](const LabeledDataset& d, std::size_t i) { return to_array(d.sequences.at(i)); }, py::arg("index"))
      .def("label", [](const LabeledDataset& d, std::size_t i) { return d.sequences.at(i).label()->id; }, py::arg("index"))
      .def("save", [](const LabeledDataset& d, const std::filesystem::path& root) { save_dataset(root, d); });

  m.def("load_dataset", [](const std::filesystem::path& root) { return load_dataset(root); }, py::arg("root"));
  m.def(
      "generate_synthetic",
      [](std::size_t classes, std::size_t per_class, std::size_t frames, int width, int height, std::uint64_t seed,
         double frame_noise) {
        return generate_synthetic({classes, per_class, frames, {width, height}, seed, frame_noise});
      },
      py::arg("classes") = 6, py::arg("per_class") = 20, py::arg("frames") = 40, py::arg("width") = 64,
      py::arg("height") = 64, py::arg("seed") = 0, py::arg("frame_noise") = 0.0);

  py::class_<TrainedModel>(m, "Model")
      .def_readonly("class_names", &TrainedModel::class_names)
      .def_readonly("cue_accuracies", &TrainedModel::cue_accuracies)
      .def_property_readonly("fusion_weights", [](const TrainedModel& t) { return t.weights.values; })
      .def_property_readonly("feature_dim", &TrainedModel::feature_dim)
      .def(
          "predict",
          [](const TrainedModel& t, const Bytes& frames) {
            const GestureLabel g = predict_sequence(t, to_sequence(frames));
            return py::make_tuple(g.id, g.name);
          },
          py::arg("frames"))
      .def("save", [](const TrainedModel& t, const std::filesystem::path& p) { save_model(p, t); })
      .def("to_bytes", [](const TrainedModel& t) {
        const auto b = serialize_model(t);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });

  m.def("train", &train, py::arg("dataset"), py::arg("config") = PipelineConfig{});
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); }, py::arg("path"));
  m.def(
      "evaluate_json",
      [](const LabeledDataset& d, const PipelineConfig& c, bool ablation, bool timing) {
        EvalReport r;
        {
          py::gil_scoped_release release;
          r = evaluate(d, c, {ablation, timing});
        }
        return report_json(r);
      },
      py::arg("dataset"), py::arg("config") = PipelineConfig{}, py::arg("ablation") = false, py::arg("timing") = false);
}
