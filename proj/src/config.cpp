#include "radpipe/config.hpp"

#include <filesystem>
#include <fstream>

#include "radpipe/error.hpp"
#include "radpipe/util.hpp"

namespace radpipe {

using nlohmann::json;
using nlohmann::ordered_json;

std::string PipelineConfig::cohort_manifest_path() const {
  if (!cohort_manifest.empty()) return cohort_manifest;
  return (std::filesystem::path(work_dir) / "cohort.csv").string();
}

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  get_if(j, "work_dir", c.work_dir);
  get_if(j, "cohort_manifest", c.cohort_manifest);

  if (j.contains("window")) {
    const auto& w = j.at("window");
    get_if(w, "center_hu", c.window.center);
    get_if(w, "width_hu", c.window.width);
  }
  get_if(j, "target_spacing_mm", c.target_spacing_mm);
  get_if(j, "crop_size", c.crop_size);

  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    get_if(a, "enabled", c.augment_enabled);
    get_if(a, "target_ratio", c.augment.target_ratio);
    get_if(a, "noise_sigma", c.augment.noise_sigma);
    get_if(a, "gamma_min", c.augment.gamma_min);
    get_if(a, "gamma_max", c.augment.gamma_max);
    get_if(a, "max_angle_deg", c.augment.max_angle_deg);
  }
  if (j.contains("extraction")) {
    const auto& e = j.at("extraction");
    get_if(e, "bin_width", c.extraction.bin_width);
    get_if(e, "bin_count", c.extraction.bin_count);
    get_if(e, "distance", c.extraction.distance);
    get_if(e, "per_slice", c.per_slice);
  }
  if (j.contains("selection")) {
    const auto& s = j.at("selection");
    get_if(s, "lambda_count", c.lambda_count);
    get_if(s, "lambda_min_ratio", c.lambda_min_ratio);
    get_if(s, "inner_folds", c.inner_folds);
  }
  get_if(j, "models", c.models);
  get_if(j, "folds", c.folds);
  get_if(j, "seed", c.seed);
  get_if(j, "bootstrap_resamples", c.bootstrap_resamples);
  get_if(j, "aggregate_rule", c.aggregate_rule);
  get_if(j, "kernels", c.kernel_backend);

  if (j.contains("phantom")) {
    const auto& p = j.at("phantom");
    get_if(p, "n_patients", c.phantom.n_patients);
    get_if(p, "n_positive", c.phantom.n_positive);
    if (p.contains("dims")) {
      auto d = p.at("dims").get<std::vector<int>>();
      if (d.size() != 3) fail(ErrorCode::InvalidConfig, "config: phantom.dims needs 3 values");
      c.phantom.dims = {d[0], d[1], d[2]};
    }
    if (p.contains("spacing")) {
      auto s = p.at("spacing").get<std::vector<double>>();
      if (s.size() != 3)
        fail(ErrorCode::InvalidConfig, "config: phantom.spacing needs 3 values");
      c.phantom.spacing = {s[0], s[1], s[2]};
    }
    get_if(p, "tumor_radius_min_mm", c.phantom.tumor_radius_min_mm);
    get_if(p, "tumor_radius_max_mm", c.phantom.tumor_radius_max_mm);
    get_if(p, "background_hu", c.phantom.background_hu);
    get_if(p, "background_noise_hu", c.phantom.background_noise_hu);
    get_if(p, "tumor_hu", c.phantom.tumor_hu);
    get_if(p, "tumor_hu_jitter", c.phantom.tumor_hu_jitter);
    get_if(p, "speckle_pos", c.phantom.speckle_pos);
    get_if(p, "speckle_neg", c.phantom.speckle_neg);
  }
  // master seed and target spacing flow into the phantom block
  c.phantom.seed = c.seed;
  c.phantom.target_spacing_mm = c.target_spacing_mm;
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("config: parse error: ") + e.what());
  }
  return config_from_json(j);
}

ordered_json config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["work_dir"] = c.work_dir;
  j["cohort_manifest"] = c.cohort_manifest_path();
  j["window"] = {{"center_hu", c.window.center}, {"width_hu", c.window.width}};
  j["target_spacing_mm"] = c.target_spacing_mm;
  j["crop_size"] = c.crop_size;
  j["augment"] = {{"enabled", c.augment_enabled},
                  {"target_ratio", c.augment.target_ratio},
                  {"noise_sigma", c.augment.noise_sigma},
                  {"gamma_min", c.augment.gamma_min},
                  {"gamma_max", c.augment.gamma_max},
                  {"max_angle_deg", c.augment.max_angle_deg}};
  j["extraction"] = {{"bin_width", c.extraction.bin_width},
                     {"bin_count", c.extraction.bin_count},
                     {"distance", c.extraction.distance},
                     {"per_slice", c.per_slice}};
  j["selection"] = {{"lambda_count", c.lambda_count},
                    {"lambda_min_ratio", c.lambda_min_ratio},
                    {"inner_folds", c.inner_folds}};
  j["models"] = c.models;
  j["folds"] = c.folds;
  j["seed"] = c.seed;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["aggregate_rule"] = c.aggregate_rule;
  j["kernels"] = c.kernel_backend;
  j["phantom"] = {{"n_patients", c.phantom.n_patients},
                  {"n_positive", c.phantom.n_positive},
                  {"dims", c.phantom.dims},
                  {"spacing", c.phantom.spacing},
                  {"tumor_radius_min_mm", c.phantom.tumor_radius_min_mm},
                  {"tumor_radius_max_mm", c.phantom.tumor_radius_max_mm},
                  {"background_hu", c.phantom.background_hu},
                  {"background_noise_hu", c.phantom.background_noise_hu},
                  {"tumor_hu", c.phantom.tumor_hu},
                  {"tumor_hu_jitter", c.phantom.tumor_hu_jitter},
                  {"speckle_pos", c.phantom.speckle_pos},
                  {"speckle_neg", c.phantom.speckle_neg}};
  return j;
}

std::string config_hash(const PipelineConfig& c) {
  return to_hex(fnv1a(config_to_json(c).dump()));
}

void validate_config(const PipelineConfig& c) {
  if (!(c.window.width > 0))
    fail(ErrorCode::InvalidConfig, "config: window width must be positive");
  if (!(c.target_spacing_mm > 0))
    fail(ErrorCode::InvalidConfig, "config: target spacing must be positive");
  if (c.crop_size < 8)
    fail(ErrorCode::InvalidConfig, "config: crop size too small");
  if (c.folds < 2) fail(ErrorCode::InvalidConfig, "config: folds must be >= 2");
  if (c.inner_folds < 2)
    fail(ErrorCode::InvalidConfig, "config: inner folds must be >= 2");
  if (c.lambda_count < 1)
    fail(ErrorCode::InvalidConfig, "config: lambda count must be >= 1");
  if (c.bootstrap_resamples < 100)
    fail(ErrorCode::InvalidConfig, "config: bootstrap resamples must be >= 100");
  if (c.models.empty())
    fail(ErrorCode::InvalidConfig, "config: at least one model required");
  for (const auto& m : c.models) model_kind_from_name(m);  // throws on junk
  if (c.aggregate_rule != "mean_score" && c.aggregate_rule != "majority_vote")
    fail(ErrorCode::InvalidConfig, "config: unknown aggregate rule " + c.aggregate_rule);
  if (c.kernel_backend != "auto" && c.kernel_backend != "scalar" &&
      c.kernel_backend != "avx2")
    fail(ErrorCode::InvalidConfig, "config: unknown kernel backend " + c.kernel_backend);
  if (!(c.extraction.bin_width > 0) && c.extraction.bin_count < 2)
    fail(ErrorCode::InvalidConfig, "config: bad discretization parameters");
}

CvConfig make_cv_config(const PipelineConfig& c) {
  CvConfig cv;
  cv.k = c.folds;
  cv.seed = c.seed;
  cv.augment_training = c.augment_enabled;
  cv.augment = c.augment;
  cv.extraction = c.extraction;
  cv.lambda_count = c.lambda_count;
  cv.lambda_min_ratio = c.lambda_min_ratio;
  cv.inner_folds = c.inner_folds;
  for (const auto& name : c.models) {
    ModelSpec spec;
    spec.kind = model_kind_from_name(name);
    cv.models.push_back(spec);
  }
  cv.aggregate = c.aggregate_rule == "majority_vote" ? AggregateRule::MajorityVote
                                                     : AggregateRule::MeanScore;
  cv.bootstrap_resamples = c.bootstrap_resamples;
  return cv;
}

}  // namespace radpipe
