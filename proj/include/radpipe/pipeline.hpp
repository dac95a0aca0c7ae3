#pragma once

#include <string>
#include <vector>

#include "radpipe/config.hpp"
#include "radpipe/eval.hpp"
#include "radpipe/matrix.hpp"
#include "radpipe/roi.hpp"

namespace radpipe {

// Feature table artifact: one row per slice-ROI (slice_index >= 0) or per
// 3D ROI (slice_index == -1), columns in canonical feature order.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> patient_id;
  std::vector<int> slice_index;
  std::vector<int> label;
  Matrix x;
};

void write_feature_csv(const FeatureTable& table, const std::string& path);
FeatureTable read_feature_csv(const std::string& path);

// Preprocessed-cohort access for the downstream stages.
std::vector<RoiStack> load_roi_stacks(const std::string& stacks_manifest_path);

// Stage entry points. Each validates its inputs, writes its artifacts into
// the work directory, removes partial outputs on failure, and returns the
// artifact paths it produced (a stage log listing them is itself one).
std::vector<std::string> stage_phantom(const PipelineConfig& config);
std::vector<std::string> stage_preprocess(const PipelineConfig& config);
std::vector<std::string> stage_extract(const PipelineConfig& config);
std::vector<std::string> stage_select(const PipelineConfig& config);
std::vector<std::string> stage_train_eval(const PipelineConfig& config);
std::vector<std::string> stage_export_channels(const PipelineConfig& config,
                                               ChannelMode mode);
std::vector<std::string> stage_report(const PipelineConfig& config);

}  // namespace radpipe
