#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "keygest/error.hpp"
#include "keygest/keyframes.hpp"
#include "keygest/pipeline.hpp"
#include "keygest/sequence_io.hpp"

using json = nlohmann::ordered_json;
using namespace keygest;

namespace {

// Flags that map onto config keys. Values stay strings until the config file, if any,
// has been read, so flags override the file and share its validation.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> raw;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(key, app->add_option(flag, raw[key], help));
  }

  // Key-frame-only commands accept any N >= 1; the full pipeline needs three for LBP-TOP.
  PipelineConfig resolve(bool pipeline = true) const {
    PipelineConfig cfg = config_file.empty() ? PipelineConfig{} : load_config(config_file);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) apply_config_entry(cfg, key, raw.at(key));
    }
    if (pipeline) {
      cfg.validate();
    } else if (cfg.n_keyframes < 1) {
      throw Error(ErrorCode::InvalidArgument, "n_keyframes must be at least 1");
    }
    return cfg;
  }
};

void add_config_file(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.config_file, "key = value config file; flags override it")->check(CLI::ExistingFile);
}

void add_size_flags(CLI::App* app, ConfigFlags& f) {
  f.add(app, "--width", "width", "resize frames to this width");
  f.add(app, "--height", "height", "resize frames to this height");
}

void add_keyframe_flags(CLI::App* app, ConfigFlags& f) {
  add_config_file(app, f);
  f.add(app, "-n,--n", "n_keyframes", "number of key frames (default 5)");
  f.add(app, "--kernel", "kernel", "density kernel: gaussian or cutoff");
  f.add(app, "--dc", "dc", "cutoff distance, or auto");
  add_size_flags(app, f);
}

void add_pipeline_flags(CLI::App* app, ConfigFlags& f) {
  add_keyframe_flags(app, f);
  f.add(app, "-D,--dictionary-size", "dictionary_size", "codebook size D");
  f.add(app, "--stride", "stride", "patch grid stride in pixels");
  f.add(app, "--appearance", "appearance", "appearance descriptor: patch-gradient or lbp");
  f.add(app, "-c,--svm-c", "svm_c", "SVM regularization c");
  f.add(app, "--epochs", "svm_epochs", "SVM epochs");
  f.add(app, "--seed", "seed", "random seed");
  f.add(app, "--splits", "splits", "random splits for evaluate");
  f.add(app, "--train-fraction", "train_fraction", "training share");
  f.add(app, "--validation-fraction", "validation_fraction", "validation share");
  f.add(app, "--test-fraction", "test_fraction", "test share");
  f.add(app, "--codebook-sample-cap", "codebook_sample_cap", "max descriptors fed to k-means");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + out);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "failed writing " + out);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

FrameSequence read_input(const std::string& dir, const PipelineConfig& cfg) { return load_sequence(dir, cfg.target_size); }

json nullable_frame(std::size_t point, const DecisionGraph& g) {
  if (point == kNoHigher) return nullptr;
  return g.extrema.points[point].frame_index;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key-frame extraction and gesture classification"};
  app.require_subcommand(1);
  std::string out;

  ConfigFlags extract_flags;
  std::string extract_input;
  auto* extract = app.add_subcommand("extract", "select key frames of one sequence");
  extract->add_option("-i,--input", extract_input, "directory of frames")->required();
  extract->add_option("-o,--out", out, "write JSON here instead of stdout");
  add_keyframe_flags(extract, extract_flags);

  ConfigFlags entropy_flags;
  std::string entropy_input;
  auto* entropy = app.add_subcommand("entropy", "per-frame entropy curve of one sequence");
  entropy->add_option("-i,--input", entropy_input, "directory of frames")->required();
  entropy->add_option("-o,--out", out, "write JSON here instead of stdout");
  add_config_file(entropy, entropy_flags);
  add_size_flags(entropy, entropy_flags);

  ConfigFlags graph_flags;
  std::string graph_input;
  auto* graph = app.add_subcommand("decision-graph", "density and separation of each extreme point");
  graph->add_option("-i,--input", graph_input, "directory of frames")->required();
  graph->add_option("-o,--out", out, "write JSON here instead of stdout");
  add_keyframe_flags(graph, graph_flags);

  ConfigFlags train_flags;
  std::string train_data, train_model;
  auto* train_cmd = app.add_subcommand("train", "fit a model on a labelled dataset");
  train_cmd->add_option("-d,--data", train_data, "dataset root: <class>/<sequence>/<frames>")->required();
  train_cmd->add_option("-m,--model", train_model, "model file to write")->required();
  add_pipeline_flags(train_cmd, train_flags);

  std::string predict_model;
  std::vector<std::string> predict_inputs;
  auto* predict = app.add_subcommand("predict", "classify sequences with a trained model");
  predict->add_option("-m,--model", predict_model, "model file")->required()->check(CLI::ExistingFile);
  predict->add_option("-i,--input", predict_inputs, "sequence directories")->required();
  predict->add_option("-o,--out", out, "write JSON here instead of stdout");

  ConfigFlags eval_flags;
  std::string eval_data, eval_format = "json";
  bool ablation = false, timing = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "repeated stratified train/validation/test evaluation");
  evaluate_cmd->add_option("-d,--data", eval_data, "dataset root: <class>/<sequence>/<frames>")->required();
  evaluate_cmd->add_option("--format", eval_format, "json or table")->check(CLI::IsMember({"json", "table"}));
  evaluate_cmd->add_flag("--ablation", ablation, "also report appearance-only and motion-only accuracy");
  evaluate_cmd->add_flag("--timing", timing, "add per-stage wall-clock timings");
  evaluate_cmd->add_option("-o,--out", out, "write the report here instead of stdout");
  add_pipeline_flags(evaluate_cmd, eval_flags);

  SynthParams sp;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic labelled gesture dataset");
  synth->add_option("-o,--out", synth_out, "dataset root to create")->required();
  synth->add_option("--classes", sp.classes, "number of classes")->capture_default_str();
  synth->add_option("--per-class", sp.per_class, "sequences per class")->capture_default_str();
  synth->add_option("--frames", sp.frames, "frames per sequence")->capture_default_str();
  synth->add_option("--width", sp.size.width, "frame width")->capture_default_str();
  synth->add_option("--height", sp.size.height, "frame height")->capture_default_str();
  synth->add_option("--seed", sp.seed, "random seed")->capture_default_str();
  synth->add_option("--frame-noise", sp.frame_noise, "per-frame Gaussian noise sigma")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      const PipelineConfig cfg = extract_flags.resolve(false);
      const FrameSequence seq = read_input(extract_input, cfg);
      const EntropyCurve curve = entropy_curve(seq);
      const KeyFrameSet keys = keyframes_from_curve(curve, cfg.keyframe_options());
      emit(dump(json{{"source_id", seq.source_id()},
                     {"indices", keys.indices},
                     {"fallback_used", keys.fallback_used},
                     {"entropy_bits", curve.bits}}),
           out);
    } else if (*entropy) {
      const PipelineConfig cfg = entropy_flags.resolve(false);
      const FrameSequence seq = read_input(entropy_input, cfg);
      emit(dump(json{{"source_id", seq.source_id()}, {"entropy_bits", entropy_curve(seq).bits}}), out);
    } else if (*graph) {
      const PipelineConfig cfg = graph_flags.resolve(false);
      const FrameSequence seq = read_input(graph_input, cfg);
      const DecisionGraph g = decision_graph(entropy_curve(seq), cfg.keyframe_options());
      const auto& centers = g.peaks.clustering.centers;
      json points = json::array();
      for (std::size_t k = 0; k < g.points.size(); ++k) {
        const ExtremePoint& e = g.extrema.points[k];
        points.push_back({{"frame", e.frame_index},
                          {"kind", e.kind == ExtremumKind::Maximum ? "maximum" : "minimum"},
                          {"entropy", e.entropy},
                          {"x", g.points[k].x},
                          {"y", g.points[k].y},
                          {"rho", g.peaks.profile.rho[k]},
                          {"delta", g.peaks.profile.delta[k]},
                          {"nearest_higher", nullable_frame(g.peaks.profile.nearest_higher[k], g)},
                          {"center", std::find(centers.begin(), centers.end(), k) != centers.end()}});
      }
      json center_frames = json::array();
      for (std::size_t c : centers) center_frames.push_back(g.extrema.points[c].frame_index);
      emit(dump(json{{"source_id", seq.source_id()},
                     {"kernel", to_string(cfg.kernel)},
                     {"dc", g.points.empty() ? json(nullptr) : json(g.peaks.dc)},
                     {"points", points},
                     {"centers", center_frames}}),
           out);
    } else if (*train_cmd) {
      const PipelineConfig cfg = train_flags.resolve();
      const TrainedModel model = train(load_dataset(train_data, cfg.target_size), cfg);
      save_model(train_model, model);
      std::cout << dump(json{{"model", train_model},
                             {"classes", model.class_names},
                             {"feature_dim", model.feature_dim()},
                             {"cue_accuracies", model.cue_accuracies},
                             {"fusion_weights", model.weights.values}});
    } else if (*predict) {
      const TrainedModel model = load_model(predict_model);
      json results = json::array();
      for (const std::string& dir : predict_inputs) {
        const GestureLabel label = predict_sequence(model, load_sequence(dir));
        results.push_back({{"source_id", dir}, {"label", label.name}, {"label_id", label.id}});
      }
      emit(dump(results), out);
    } else if (*evaluate_cmd) {
      const PipelineConfig cfg = eval_flags.resolve();
      const EvalReport report = evaluate(load_dataset(eval_data, cfg.target_size), cfg, {ablation, timing});
      emit(eval_format == "table" ? report_table(report) : report_json(report), out);
    } else if (*synth) {
      const LabeledDataset ds = generate_synthetic(sp);
      save_dataset(synth_out, ds);
      std::cout << dump(json{{"out", synth_out},
                             {"classes", ds.class_names},
                             {"sequences", ds.sequences.size()},
                             {"frames", sp.frames}});
    }
  } catch (const std::exception& e) {
    std::cerr << "keygest: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
