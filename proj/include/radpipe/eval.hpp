#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radpipe/augment.hpp"
#include "radpipe/models.hpp"
#include "radpipe/radiomics.hpp"
#include "radpipe/roi.hpp"
#include "radpipe/selection.hpp"

namespace radpipe {

struct PatientLabel {
  std::string patient_id;
  int label = 0;
};

// Patient-grouped stratified fold assignment: shuffled positives are dealt
// round-robin first, shuffled negatives continue the same rotation, so
// positives spread as evenly as counts allow and fold sizes differ by at
// most one.
struct FoldAssignment {
  int k = 0;
  std::vector<std::pair<std::string, int>> fold_of;  // patient -> fold

  int fold(const std::string& patient_id) const;
  std::vector<int> fold_sizes() const;
};

FoldAssignment make_folds(const std::vector<PatientLabel>& patients, int k,
                          uint64_t seed);

// Mann-Whitney AUC with half credit for tied scores.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  int degenerate_resamples = 0;  // redraw cap hits, reported not hidden
};

// Percentile bootstrap over resampled (score, label) pairs; single-class
// resamples are redrawn (capped).
BootstrapCi bootstrap_ci(const std::vector<double>& scores,
                         const std::vector<int>& labels, int n_resamples,
                         uint64_t seed);

enum class AggregateRule { MeanScore, MajorityVote };

struct PatientAggregate {
  std::vector<std::string> patient_ids;
  std::vector<int> predicted;
  std::vector<int> truth;
  double accuracy = 0.0;
};

// One prediction per patient from its slice scores: mean-score thresholded
// at 0.5 (default) or majority vote of slice labels (ties toward negative).
PatientAggregate patient_aggregate(const std::vector<double>& slice_scores,
                                   const std::vector<int>& slice_pred_labels,
                                   const std::vector<int>& slice_truth,
                                   const std::vector<std::string>& patient_ids,
                                   AggregateRule rule);

// ---- full cross-validated pipeline evaluation

struct CvConfig {
  int k = 4;
  uint64_t seed = 0;
  bool augment_training = true;   // training folds only, never validation
  AugmentPolicy augment;
  ExtractionParams extraction;
  int lambda_count = 50;
  double lambda_min_ratio = 1e-3;
  int inner_folds = 3;
  std::vector<ModelSpec> models;  // empty -> selection reports only
  bool arm_with_selection = true;
  bool arm_without_selection = true;
  AggregateRule aggregate = AggregateRule::MeanScore;
  int bootstrap_resamples = 1000;
};

struct SliceOut {
  std::string patient_id;
  int slice_index = 0;
  int fold = 0;
  int label = 0;
};

struct ModelArmResult {
  std::string model;
  bool feature_selection = false;
  std::vector<double> fold_accuracy;      // per evaluated fold, ordered by fold id
  std::vector<int> evaluated_folds;
  std::vector<int> skipped_folds;         // single-class training sets
  double accuracy_mean = 0.0;
  double accuracy_variance = 0.0;         // population variance across folds
  double pooled_slice_accuracy = 0.0;
  double pooled_auc = 0.0;
  BootstrapCi auc_ci;
  double patient_accuracy = 0.0;
  std::vector<double> slice_scores;       // aligned with EvalReport::slices
  std::vector<int> slice_predicted;
};

struct FoldSelectionReport {
  int fold = 0;
  double lambda = 0.0;
  bool used_fallback = false;
  std::vector<std::string> names;
  std::vector<double> grid;
  std::vector<double> cv_mean_error;
  std::vector<double> cv_se;
};

struct EvalReport {
  int k = 0;
  uint64_t seed = 0;
  int n_patients = 0;
  int n_positive = 0;
  FoldAssignment folds;
  std::vector<SliceOut> slices;           // out-of-fold rows, fold-major order
  std::vector<ModelArmResult> results;
  std::vector<FoldSelectionReport> selection;
};

// Per fold: augment training slices, extract features (originals cached),
// standardize and select on training data only, then train and score every
// requested model on the untouched validation slices.
EvalReport cross_validate(const std::vector<RoiStack>& cohort, const CvConfig& config);

}  // namespace radpipe
