#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radpipe/augment.hpp"
#include "radpipe/eval.hpp"
#include "radpipe/phantom.hpp"
#include "radpipe/radiomics.hpp"
#include "radpipe/volume.hpp"

#include "json.hpp"

namespace radpipe {

// One configuration drives every stage; a single master seed derives all
// stage and per-item seeds deterministically.
struct PipelineConfig {
  std::string work_dir = "work";
  std::string cohort_manifest;  // defaults to <work_dir>/cohort.csv

  Window window;                 // HU display window
  double target_spacing_mm = 1.0;
  int crop_size = 128;

  bool augment_enabled = true;
  AugmentPolicy augment;

  ExtractionParams extraction;
  bool per_slice = true;         // feature rows per slice (else per 3D stack)

  int lambda_count = 50;
  double lambda_min_ratio = 1e-3;
  int inner_folds = 3;

  std::vector<std::string> models = {"svm", "logistic", "knn", "random_forest",
                                     "adaboost"};
  int folds = 4;
  uint64_t seed = 20230901;
  int bootstrap_resamples = 1000;
  std::string aggregate_rule = "mean_score";  // or "majority_vote"

  PhantomParams phantom;
  std::string kernel_backend = "auto";  // auto | scalar | avx2

  std::string cohort_manifest_path() const;
};

PipelineConfig load_config(const std::string& path);            // JSON file
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const PipelineConfig& c);  // canonical form

// FNV-1a over the canonical serialized config; embedded in every report.
std::string config_hash(const PipelineConfig& c);

void validate_config(const PipelineConfig& c);

CvConfig make_cv_config(const PipelineConfig& c);

}  // namespace radpipe
