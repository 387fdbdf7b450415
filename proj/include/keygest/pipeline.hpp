#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keygest/bof.hpp"
#include "keygest/classifier.hpp"
#include "keygest/descriptors.hpp"
#include "keygest/fusion.hpp"
#include "keygest/keyframes.hpp"
#include "keygest/rng.hpp"
#include "keygest/sequence_io.hpp"

namespace keygest {

struct PipelineConfig {
  std::size_t n_keyframes = 5;
  std::size_t dictionary_size = 16;
  DensityKernel kernel = DensityKernel::Gaussian;
  std::optional<double> dc;
  int stride = kPatchSize;
  std::string appearance = "patch-gradient";
  double svm_c = 1.0;
  int svm_epochs = 200;
  std::uint64_t seed = 0;
  std::size_t splits = 20;
  double train_fraction = 0.50;
  double validation_fraction = 0.25;
  double test_fraction = 0.25;
  std::optional<Size2> target_size;
  // Upper bound on descriptors fed to k-means; a seeded subsample is drawn above it.
  std::size_t codebook_sample_cap = 20000;

  void validate() const;
  KeyFrameOptions keyframe_options() const { return {n_keyframes, kernel, dc}; }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Applies one `key = value` entry. Unknown keys and malformed values throw.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);

// Line-based `key = value`; blank lines and `#` comments are ignored.
PipelineConfig parse_config(std::istream& in, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string format_config(const PipelineConfig& cfg);

// Everything that does not depend on a trained codebook.
struct SequenceFeatures {
  KeyFrameSet keys;
  std::vector<Matrix> frame_descriptors;  // one matrix per key frame
  std::vector<double> motion;             // hist2
};

SequenceFeatures featurize(const FrameSequence& seq, const PipelineConfig& cfg, const AppearanceExtractor& appearance,
                           const MotionExtractor& motion);

// hist1: per-key-frame BoF histograms after the Hellinger mapping, padded with zero
// blocks to n_keyframes * D when the sequence had fewer frames.
std::vector<double> appearance_vector(const SequenceFeatures& features, const Codebook& codebook,
                                      std::size_t n_keyframes);

struct TrainedModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  PipelineConfig config;
  std::vector<std::string> class_names;
  Codebook codebook;
  std::vector<double> cue_accuracies;  // validation R_a, R_m in percent
  FusionWeights weights;
  LinearModel classifier;

  std::size_t appearance_dim() const { return config.n_keyframes * codebook.size(); }
  std::size_t feature_dim() const { return appearance_dim() + kLbpTopDim; }

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// Stratified by label. A class with c members gives max(1, floor(c*test)) to test,
// max(1, floor(c*validation)) to validation and the rest to training; fractions that are
// zero give nothing. Each list is sorted.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

SplitIndices stratified_split(std::span<const int> labels, double validation_fraction, double test_fraction,
                              Rng& rng);

// Splits `dataset` into training and validation in the configured ratio, scores the two
// single-cue classifiers on validation to obtain the fusion weights, then refits on both.
TrainedModel train(const LabeledDataset& dataset, const PipelineConfig& cfg);

GestureLabel predict_sequence(const TrainedModel& model, const FrameSequence& seq);

// Versioned little-endian tagged binary.
std::vector<std::uint8_t> serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

struct StageTimings {
  double entropy_s = 0.0;
  double clustering_s = 0.0;
  double features_s = 0.0;
  double classification_s = 0.0;
};

// Median wall-clock over `runs` repetitions of each stage for one sequence.
StageTimings time_keyframe_stages(const FrameSequence& seq, const KeyFrameOptions& options, int runs = 5);
StageTimings time_stages(const TrainedModel& model, const FrameSequence& seq, int runs = 5);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};

Summary summarize(std::span<const double> values);

struct EvalOptions {
  bool ablation = false;  // also score appearance-only and motion-only classifiers
  bool timing = false;    // timings are wall-clock and make the report non-reproducible
};

struct EvalReport {
  PipelineConfig config;
  std::vector<std::string> class_names;
  std::vector<double> fused;  // per-split test accuracy, percent
  std::vector<double> appearance;
  std::vector<double> motion;
  std::vector<FusionWeights> weights;
  std::vector<std::vector<double>> cue_accuracies;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted], summed over splits
  std::optional<StageTimings> timings;

  Summary fused_summary() const { return summarize(fused); }
  Summary appearance_summary() const { return summarize(appearance); }
  Summary motion_summary() const { return summarize(motion); }
};

EvalReport evaluate(const LabeledDataset& dataset, const PipelineConfig& cfg, const EvalOptions& options = {});

std::string report_json(const EvalReport& report);
std::string report_table(const EvalReport& report);

struct SynthParams {
  std::size_t classes = 6;
  std::size_t per_class = 20;
  std::size_t frames = 40;
  Size2 size{64, 64};
  std::uint64_t seed = 0;
  // standard deviation of per-frame Gaussian sensor noise; 0 keeps the background static
  double frame_noise = 0.0;
};

// Class k moves a textured shape along motion pattern k (shape family k mod 3) over a
// noisy static background, with seeded per-sequence jitter.
LabeledDataset generate_synthetic(const SynthParams& params);

}  // namespace keygest
