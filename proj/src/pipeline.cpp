#include "keygest/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "keygest/error.hpp"
#include "keygest/rng.hpp"
#include "keygest/sequence_io.hpp"

namespace keygest {
namespace {

// Stream ids for derive_seed within one training run.
enum SeedStream : std::uint64_t {
  kSplitStream = 0,
  kCodebookStream = 1,
  kCodebookSampleStream = 2,
  kAppearanceSvmStream = 3,
  kMotionSvmStream = 4,
  kFusedSvmStream = 5,
};

FrameSequence prepare(const FrameSequence& seq, const PipelineConfig& cfg) {
  if (!cfg.target_size || seq.front().size() == *cfg.target_size) return seq;
  std::vector<Frame> frames;
  frames.reserve(seq.size());
  for (const Frame& f : seq.frames()) frames.push_back(resize_bilinear(f, *cfg.target_size));
  return FrameSequence(std::move(frames), seq.source_id(), seq.label());
}

std::size_t worker_count() {
  if (const char* env = std::getenv("KEYGEST_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(0..n-1) on worker_count() threads. Results must go to per-index slots; the
// lowest-index exception is rethrown so failures match a serial run.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  const std::size_t workers = std::min(n, worker_count());
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<int> label_ids(const LabeledDataset& ds) {
  std::vector<int> ids;
  ids.reserve(ds.sequences.size());
  for (const FrameSequence& s : ds.sequences) {
    if (!s.label()) throw Error(ErrorCode::DegenerateDataset, "sequence '" + s.source_id() + "' has no label");
    const int id = s.label()->id;
    if (id < 0 || static_cast<std::size_t>(id) >= ds.class_names.size()) {
      throw Error(ErrorCode::OutOfRange, "sequence '" + s.source_id() + "' has an unknown label id");
    }
    ids.push_back(id);
  }
  return ids;
}

void check_class_count(const LabeledDataset& ds) {
  if (ds.class_names.size() < 2) throw Error(ErrorCode::DegenerateDataset, "dataset needs at least two classes");
}

std::vector<SequenceFeatures> featurize_all(const LabeledDataset& ds, const PipelineConfig& cfg) {
  const auto appearance = make_appearance_extractor(cfg.appearance, cfg.stride);
  const LbpTopExtractor motion;
  std::vector<SequenceFeatures> out(ds.sequences.size());
  parallel_for(ds.sequences.size(), [&](std::size_t i) {
    const FrameSequence& s = ds.sequences[i];
    try {
      out[i] = featurize(prepare(s, cfg), cfg, *appearance, motion);
    } catch (const Error& e) {
      throw Error(e.code(), "sequence '" + s.source_id() + "': " + e.what());
    }
  });
  return out;
}

Codebook fit_codebook(const std::vector<SequenceFeatures>& features, std::span<const std::size_t> rows,
                      const PipelineConfig& cfg, std::uint64_t seed) {
  std::size_t total = 0;
  std::size_t dim = 0;
  for (std::size_t r : rows) {
    for (const Matrix& m : features[r].frame_descriptors) {
      total += m.rows();
      if (m.rows()) dim = m.cols();
    }
  }
  if (total == 0) throw Error(ErrorCode::DegenerateDataset, "no appearance descriptors to build a codebook");

  std::vector<std::size_t> keep(total);
  std::iota(keep.begin(), keep.end(), std::size_t{0});
  if (total > cfg.codebook_sample_cap) {
    Rng rng(derive_seed(seed, kCodebookSampleStream));
    rng.shuffle(std::span<std::size_t>(keep));
    keep.resize(cfg.codebook_sample_cap);
    std::sort(keep.begin(), keep.end());
  }
  Matrix sample(0, dim);
  std::size_t flat = 0, next = 0;
  for (std::size_t r : rows) {
    for (const Matrix& m : features[r].frame_descriptors) {
      for (std::size_t i = 0; i < m.rows(); ++i, ++flat) {
        if (next < keep.size() && keep[next] == flat) {
          sample.append_row(m.row(i));
          ++next;
        }
      }
    }
  }
  return train_codebook(sample, cfg.dictionary_size, derive_seed(seed, kCodebookStream));
}

struct CueMatrices {
  Matrix appearance;
  Matrix motion;
  std::vector<int> labels;
};

CueMatrices cue_matrices(const std::vector<SequenceFeatures>& features, std::span<const int> labels,
                         std::span<const std::size_t> rows, const Codebook& codebook, std::size_t n_keyframes) {
  CueMatrices c{Matrix(0, n_keyframes * codebook.size()), Matrix(0, kLbpTopDim), {}};
  for (std::size_t r : rows) {
    c.appearance.append_row(appearance_vector(features[r], codebook, n_keyframes));
    c.motion.append_row(features[r].motion);
    c.labels.push_back(labels[r]);
  }
  return c;
}

Matrix fused_matrix(const CueMatrices& c, const FusionWeights& w) {
  Matrix out(0, c.appearance.cols() + c.motion.cols());
  for (std::size_t i = 0; i < c.appearance.rows(); ++i) out.append_row(fuse(c.appearance.row(i), c.motion.row(i), w));
  return out;
}

std::vector<std::size_t> merged(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

SvmParams svm_params(const PipelineConfig& cfg, std::uint64_t seed) { return {cfg.svm_c, cfg.svm_epochs, seed}; }

struct FitResult {
  TrainedModel model;
  CueMatrices trainval;
};

FitResult fit(const std::vector<SequenceFeatures>& features, std::span<const int> labels,
              const std::vector<std::string>& class_names, std::span<const std::size_t> train_rows,
              std::span<const std::size_t> val_rows, const PipelineConfig& cfg, std::uint64_t seed) {
  const std::vector<std::size_t> all_rows = merged(train_rows, val_rows);
  FitResult out;
  TrainedModel& model = out.model;
  model.config = cfg;
  model.class_names = class_names;
  model.codebook = fit_codebook(features, all_rows, cfg, seed);

  const std::size_t n = cfg.n_keyframes;
  const bool has_validation = !val_rows.empty();
  const CueMatrices train = cue_matrices(features, labels, has_validation ? train_rows : all_rows, model.codebook, n);
  const CueMatrices held = has_validation ? cue_matrices(features, labels, val_rows, model.codebook, n) : train;

  const LinearModel app = train_svm(train.appearance, train.labels, class_names,
                                    svm_params(cfg, derive_seed(seed, kAppearanceSvmStream)));
  const LinearModel mot = train_svm(train.motion, train.labels, class_names,
                                    svm_params(cfg, derive_seed(seed, kMotionSvmStream)));
  model.cue_accuracies = {accuracy_percent(app, held.appearance, held.labels),
                          accuracy_percent(mot, held.motion, held.labels)};
  model.weights = fusion_weights(model.cue_accuracies);

  out.trainval = cue_matrices(features, labels, all_rows, model.codebook, n);
  model.classifier = train_svm(fused_matrix(out.trainval, model.weights), out.trainval.labels, class_names,
                               svm_params(cfg, derive_seed(seed, kFusedSvmStream)));
  return out;
}

std::vector<double> fused_vector(const TrainedModel& model, const SequenceFeatures& f) {
  return fuse(appearance_vector(f, model.codebook, model.config.n_keyframes), f.motion, model.weights);
}

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SequenceFeatures featurize(const FrameSequence& seq, const PipelineConfig& cfg, const AppearanceExtractor& appearance,
                           const MotionExtractor& motion) {
  SequenceFeatures f;
  f.keys = extract_keyframes(seq, cfg.keyframe_options());
  const FrameSequence keyseq = subsample(seq, f.keys);
  f.frame_descriptors.reserve(keyseq.size());
  for (const Frame& frame : keyseq.frames()) f.frame_descriptors.push_back(appearance.extract(frame));
  f.motion = motion.extract(to_grayscale_stack(keyseq));
  return f;
}

std::vector<double> appearance_vector(const SequenceFeatures& features, const Codebook& codebook,
                                      std::size_t n_keyframes) {
  std::vector<double> out(n_keyframes * codebook.size(), 0.0);
  const std::size_t frames = std::min(n_keyframes, features.frame_descriptors.size());
  for (std::size_t i = 0; i < frames; ++i) {
    std::vector<double> h = encode(features.frame_descriptors[i], codebook);
    hellinger(h);
    std::copy(h.begin(), h.end(), out.begin() + static_cast<std::ptrdiff_t>(i * codebook.size()));
  }
  return out;
}

SplitIndices stratified_split(std::span<const int> labels, double validation_fraction, double test_fraction, Rng& rng) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  SplitIndices out;
  for (auto& [label, members] : by_class) {
    const double c = static_cast<double>(members.size());
    const std::size_t n_test = test_fraction > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(c * test_fraction))) : 0;
    const std::size_t n_val =
        validation_fraction > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(c * validation_fraction))) : 0;
    if (n_test + n_val + 1 > members.size()) {
      throw Error(ErrorCode::DegenerateDataset, "class " + std::to_string(label) + " has " +
                                                    std::to_string(members.size()) + " sequences, too few to stratify");
    }
    rng.shuffle(std::span<std::size_t>(members));
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.validation.insert(out.validation.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                          members.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

TrainedModel train(const LabeledDataset& dataset, const PipelineConfig& cfg) {
  cfg.validate();
  check_class_count(dataset);
  const std::vector<int> labels = label_ids(dataset);
  const std::vector<SequenceFeatures> features = featurize_all(dataset, cfg);
  Rng rng(derive_seed(cfg.seed, kSplitStream));
  const double val_share = cfg.validation_fraction / (cfg.train_fraction + cfg.validation_fraction);
  const SplitIndices split = stratified_split(labels, val_share, 0.0, rng);
  return fit(features, labels, dataset.class_names, split.train, split.validation, cfg, cfg.seed).model;
}

GestureLabel predict_sequence(const TrainedModel& model, const FrameSequence& seq) {
  const auto appearance = make_appearance_extractor(model.config.appearance, model.config.stride);
  const SequenceFeatures f = featurize(prepare(seq, model.config), model.config, *appearance, LbpTopExtractor{});
  return model.classifier.predict(fused_vector(model, f));
}

StageTimings time_keyframe_stages(const FrameSequence& seq, const KeyFrameOptions& options, int runs) {
  std::vector<double> entropy, clustering;
  for (int r = 0; r < std::max(runs, 1); ++r) {
    EntropyCurve curve;
    entropy.push_back(seconds([&] { curve = entropy_curve(seq); }));
    clustering.push_back(seconds([&] { (void)keyframes_from_curve(curve, options); }));
  }
  return {median(entropy), median(clustering), 0.0, 0.0};
}

StageTimings time_stages(const TrainedModel& model, const FrameSequence& input, int runs) {
  const FrameSequence seq = prepare(input, model.config);
  const auto appearance = make_appearance_extractor(model.config.appearance, model.config.stride);
  const LbpTopExtractor motion;
  std::vector<double> entropy, clustering, features, classification;
  for (int r = 0; r < std::max(runs, 1); ++r) {
    EntropyCurve curve;
    KeyFrameSet keys;
    std::vector<double> hist;
    entropy.push_back(seconds([&] { curve = entropy_curve(seq); }));
    clustering.push_back(seconds([&] { keys = keyframes_from_curve(curve, model.config.keyframe_options()); }));
    features.push_back(seconds([&] {
      const FrameSequence keyseq = subsample(seq, keys);
      SequenceFeatures f;
      f.keys = keys;
      for (const Frame& frame : keyseq.frames()) f.frame_descriptors.push_back(appearance->extract(frame));
      f.motion = motion.extract(to_grayscale_stack(keyseq));
      hist = fused_vector(model, f);
    }));
    classification.push_back(seconds([&] { (void)model.classifier.predict(hist); }));
  }
  return {median(entropy), median(clustering), median(features), median(classification)};
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

EvalReport evaluate(const LabeledDataset& dataset, const PipelineConfig& cfg, const EvalOptions& options) {
  cfg.validate();
  check_class_count(dataset);
  const std::vector<int> labels = label_ids(dataset);
  {
    std::vector<std::size_t> counts(dataset.class_names.size(), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] < 4) {
        throw Error(ErrorCode::DegenerateDataset, "class '" + dataset.class_names[k] + "' has " +
                                                      std::to_string(counts[k]) +
                                                      " sequences; at least 4 are needed to stratify train/validation/test");
      }
    }
  }
  const std::vector<SequenceFeatures> features = featurize_all(dataset, cfg);

  EvalReport report;
  report.config = cfg;
  report.class_names = dataset.class_names;
  const std::size_t n_classes = dataset.class_names.size();
  report.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));

  struct SplitOutcome {
    double fused = 0.0;
    double appearance = 0.0;
    double motion = 0.0;
    FusionWeights weights;
    std::vector<double> cue_accuracies;
    std::vector<std::vector<std::size_t>> confusion;
  };
  std::vector<SplitOutcome> outcomes(cfg.splits);
  std::optional<TrainedModel> first_model;

  parallel_for(cfg.splits, [&](std::size_t s) {
    const std::uint64_t split_seed = derive_seed(cfg.seed, 1000 + s);
    Rng rng(derive_seed(split_seed, kSplitStream));
    const SplitIndices split = stratified_split(labels, cfg.validation_fraction, cfg.test_fraction, rng);
    FitResult fitted = fit(features, labels, dataset.class_names, split.train, split.validation, cfg, split_seed);
    const TrainedModel& model = fitted.model;
    SplitOutcome& out = outcomes[s];
    out.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));

    const CueMatrices test = cue_matrices(features, labels, split.test, model.codebook, cfg.n_keyframes);
    const Matrix test_fused = fused_matrix(test, model.weights);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_fused.rows(); ++i) {
      const int predicted = model.classifier.predict(test_fused.row(i)).id;
      ++out.confusion[static_cast<std::size_t>(test.labels[i])][static_cast<std::size_t>(predicted)];
      if (predicted == test.labels[i]) ++correct;
    }
    out.fused = 100.0 * static_cast<double>(correct) / static_cast<double>(test_fused.rows());
    out.weights = model.weights;
    out.cue_accuracies = model.cue_accuracies;

    if (options.ablation) {
      const LinearModel app = train_svm(fitted.trainval.appearance, fitted.trainval.labels, dataset.class_names,
                                        svm_params(cfg, derive_seed(split_seed, kAppearanceSvmStream)));
      const LinearModel mot = train_svm(fitted.trainval.motion, fitted.trainval.labels, dataset.class_names,
                                        svm_params(cfg, derive_seed(split_seed, kMotionSvmStream)));
      out.appearance = accuracy_percent(app, test.appearance, test.labels);
      out.motion = accuracy_percent(mot, test.motion, test.labels);
    }
    if (s == 0) first_model = model;
  });

  for (const SplitOutcome& out : outcomes) {
    report.fused.push_back(out.fused);
    report.weights.push_back(out.weights);
    report.cue_accuracies.push_back(out.cue_accuracies);
    if (options.ablation) {
      report.appearance.push_back(out.appearance);
      report.motion.push_back(out.motion);
    }
    for (std::size_t t = 0; t < n_classes; ++t)
      for (std::size_t p = 0; p < n_classes; ++p) report.confusion[t][p] += out.confusion[t][p];
  }

  if (options.timing && first_model && !dataset.sequences.empty()) {
    report.timings = time_stages(*first_model, dataset.sequences.front());
  }
  return report;
}

}  // namespace keygest
