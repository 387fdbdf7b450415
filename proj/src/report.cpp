#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "keygest/pipeline.hpp"

namespace keygest {
namespace {

using json = nlohmann::ordered_json;

json cue_json(const std::vector<double>& per_split) {
  const Summary s = summarize(per_split);
  return json{{"per_split", per_split}, {"mean", s.mean}, {"std", s.stddev}};
}

json config_json(const PipelineConfig& cfg) {
  json j{{"n_keyframes", cfg.n_keyframes},
         {"dictionary_size", cfg.dictionary_size},
         {"kernel", to_string(cfg.kernel)},
         {"dc", cfg.dc ? json(*cfg.dc) : json("auto")},
         {"stride", cfg.stride},
         {"appearance", cfg.appearance},
         {"svm_c", cfg.svm_c},
         {"svm_epochs", cfg.svm_epochs},
         {"seed", cfg.seed},
         {"splits", cfg.splits},
         {"train_fraction", cfg.train_fraction},
         {"validation_fraction", cfg.validation_fraction},
         {"test_fraction", cfg.test_fraction}};
  if (cfg.target_size) j["target_size"] = {cfg.target_size->width, cfg.target_size->height};
  return j;
}

std::string percent_cell(const Summary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%% \xC2\xB1 %.2f%%", s.mean, s.stddev);
  return buf;
}

}  // namespace

std::string report_json(const EvalReport& report) {
  json j;
  j["config"] = config_json(report.config);
  j["classes"] = report.class_names;
  j["splits"] = report.fused.size();
  j["fused"] = cue_json(report.fused);
  if (!report.appearance.empty()) j["appearance"] = cue_json(report.appearance);
  if (!report.motion.empty()) j["motion"] = cue_json(report.motion);
  json weights = json::array();
  for (const FusionWeights& w : report.weights) weights.push_back(w.values);
  j["fusion_weights"] = weights;
  j["cue_accuracies"] = report.cue_accuracies;
  j["confusion"] = report.confusion;
  if (report.timings) {
    j["timings_s"] = {{"entropy_calculation", report.timings->entropy_s},
                      {"density_clustering", report.timings->clustering_s},
                      {"feature_extraction", report.timings->features_s},
                      {"svm_classification", report.timings->classification_s}};
  }
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %s\n", "cue", "accuracy (mean \xC2\xB1 std over splits)");
  out << line;
  if (!report.appearance.empty()) {
    std::snprintf(line, sizeof line, "%-12s %s\n", "appearance", percent_cell(report.appearance_summary()).c_str());
    out << line;
  }
  if (!report.motion.empty()) {
    std::snprintf(line, sizeof line, "%-12s %s\n", "motion", percent_cell(report.motion_summary()).c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-12s %s\n", "fused", percent_cell(report.fused_summary()).c_str());
  out << line;
  if (report.timings) {
    const StageTimings& t = *report.timings;
    out << '\n';
    std::snprintf(line, sizeof line, "%-22s %10.4fs\n%-22s %10.4fs\n%-22s %10.4fs\n%-22s %10.4fms\n",
                  "Entropy Calculation", t.entropy_s, "Density Clustering", t.clustering_s, "Feature Extraction",
                  t.features_s, "SVM Classification", t.classification_s * 1e3);
    out << line;
  }
  return out.str();
}

}  // namespace keygest
