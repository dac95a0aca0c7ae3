#include "radpipe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "radpipe/error.hpp"
#include "radpipe/rng.hpp"
#include "radpipe/util.hpp"

namespace radpipe {

int FoldAssignment::fold(const std::string& patient_id) const {
  for (const auto& [pid, f] : fold_of)
    if (pid == patient_id) return f;
  fail(ErrorCode::BadArgument, "folds: unknown patient " + patient_id);
}

std::vector<int> FoldAssignment::fold_sizes() const {
  std::vector<int> sizes(k, 0);
  for (const auto& [pid, f] : fold_of) sizes[f]++;
  return sizes;
}

FoldAssignment make_folds(const std::vector<PatientLabel>& patients, int k,
                          uint64_t seed) {
  if (k < 2) fail(ErrorCode::BadArgument, "make_folds: k must be >= 2");
  if (static_cast<int>(patients.size()) < k)
    fail(ErrorCode::BadArgument, "make_folds: fewer patients than folds");
  {
    std::set<std::string> ids;
    for (const auto& p : patients)
      if (!ids.insert(p.patient_id).second)
        fail(ErrorCode::BadArgument, "make_folds: duplicate patient " + p.patient_id);
  }

  std::vector<std::string> positives, negatives;
  for (const auto& p : patients)
    (p.label == 1 ? positives : negatives).push_back(p.patient_id);

  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(positives);
  rng.shuffle(negatives);

  FoldAssignment out;
  out.k = k;
  int counter = 0;
  for (const auto& pid : positives) out.fold_of.emplace_back(pid, counter++ % k);
  for (const auto& pid : negatives) out.fold_of.emplace_back(pid, counter++ % k);
  std::sort(out.fold_of.begin(), out.fold_of.end());
  return out;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    fail(ErrorCode::BadArgument, "roc_auc: score/label mismatch");
  int64_t n_pos = 0, n_neg = 0;
  for (int label : labels) (label == 1 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    fail(ErrorCode::SingleClass, "roc_auc: both classes required");

  // average ranks with tie handling
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double avg_rank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

double percentile_interp(std::vector<double> sorted, double q) {
  double rank = (sorted.size() - 1) * q;
  size_t lo = static_cast<size_t>(rank);
  double frac = rank - lo;
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

BootstrapCi bootstrap_ci(const std::vector<double>& scores,
                         const std::vector<int>& labels, int n_resamples,
                         uint64_t seed) {
  if (n_resamples < 100)
    fail(ErrorCode::BadArgument, "bootstrap_ci: need at least 100 resamples");
  int64_t n_pos = 0;
  for (int label : labels)
    if (label == 1) n_pos++;
  if (n_pos == 0 || n_pos == static_cast<int64_t>(labels.size()))
    fail(ErrorCode::SingleClass, "bootstrap_ci: both classes required");

  const size_t n = scores.size();
  Rng rng(derive_seed(seed, "bootstrap"));
  constexpr int kMaxRetries = 1000;

  BootstrapCi out;
  std::vector<double> aucs;
  aucs.reserve(n_resamples);
  std::vector<double> s(n);
  std::vector<int> l(n);
  for (int b = 0; b < n_resamples; ++b) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxRetries && !ok; ++attempt) {
      bool any_pos = false, any_neg = false;
      for (size_t i = 0; i < n; ++i) {
        size_t pick = rng.uniform_int(n);
        s[i] = scores[pick];
        l[i] = labels[pick];
        (l[i] == 1 ? any_pos : any_neg) = true;
      }
      ok = any_pos && any_neg;
      if (!ok) out.degenerate_resamples++;
    }
    if (!ok) continue;  // cap exhausted; reported via degenerate_resamples
    aucs.push_back(roc_auc(s, l));
  }
  if (aucs.empty()) fail(ErrorCode::Internal, "bootstrap_ci: no valid resamples");

  std::sort(aucs.begin(), aucs.end());
  out.lo = percentile_interp(aucs, 0.025);
  out.hi = percentile_interp(aucs, 0.975);
  return out;
}

PatientAggregate patient_aggregate(const std::vector<double>& slice_scores,
                                   const std::vector<int>& slice_pred_labels,
                                   const std::vector<int>& slice_truth,
                                   const std::vector<std::string>& patient_ids,
                                   AggregateRule rule) {
  const size_t n = slice_scores.size();
  if (n == 0) fail(ErrorCode::BadArgument, "patient_aggregate: empty input");
  if (slice_pred_labels.size() != n || slice_truth.size() != n ||
      patient_ids.size() != n)
    fail(ErrorCode::BadArgument, "patient_aggregate: length mismatch");

  // group by patient, ordered by first appearance
  std::vector<std::string> order;
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < n; ++i) {
    auto [it, inserted] = groups.try_emplace(patient_ids[i]);
    if (inserted) order.push_back(patient_ids[i]);
    it->second.push_back(i);
  }

  PatientAggregate out;
  int correct = 0;
  for (const auto& pid : order) {
    const auto& rows = groups[pid];
    int pred;
    if (rule == AggregateRule::MeanScore) {
      double mean = 0.0;
      for (size_t i : rows) mean += slice_scores[i];
      mean /= static_cast<double>(rows.size());
      pred = mean >= 0.5 ? 1 : 0;
    } else {
      int64_t votes = 0;
      for (size_t i : rows) votes += slice_pred_labels[i];
      // strict majority; ties toward negative
      pred = 2 * votes > static_cast<int64_t>(rows.size()) ? 1 : 0;
    }
    int truth = slice_truth[rows.front()];
    out.patient_ids.push_back(pid);
    out.predicted.push_back(pred);
    out.truth.push_back(truth);
    if (pred == truth) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(out.patient_ids.size());
  return out;
}

// ---- cross_validate

namespace {

FeatureVector extract_slice_features(const Image& img,
                                     const std::array<double, 3>& spacing,
                                     const ExtractionParams& params) {
  GrayVolume v;
  v.dims = {1, img.side, img.side};
  v.spacing = spacing;
  v.voxels = img.px;
  return extract_all(v, params);
}

struct FoldData {
  Matrix x_train;
  std::vector<int> y_train;
  Matrix x_val;                 // standardized with the training scaler
  std::vector<int> y_val;
  std::vector<size_t> val_slice_rows;  // indices into EvalReport::slices
  bool single_class_train = false;
  SelectedFeatures selection;
};

}  // namespace

EvalReport cross_validate(const std::vector<RoiStack>& cohort, const CvConfig& config) {
  if (cohort.empty()) fail(ErrorCode::BadArgument, "cross_validate: empty cohort");

  EvalReport report;
  report.k = config.k;
  report.seed = config.seed;

  std::vector<PatientLabel> patients;
  for (const auto& stack : cohort)
    patients.push_back({stack.patient_id, stack.label});
  report.n_patients = static_cast<int>(patients.size());
  for (const auto& p : patients) report.n_positive += p.label;
  if (report.n_positive == 0)
    fail(ErrorCode::SingleClass, "cross_validate: need at least one positive patient");

  report.folds = make_folds(patients, config.k, config.seed);

  // cache original per-slice features once
  const auto& names = canonical_feature_names();
  std::vector<std::vector<std::vector<double>>> cache(cohort.size());
  parallel_for(cohort.size(), [&](size_t pi) {
    const RoiStack& stack = cohort[pi];
    cache[pi].resize(stack.slices());
    for (int s = 0; s < stack.slices(); ++s) {
      FeatureVector fv =
          extract_slice_features(stack.slice(s), stack.vox.spacing, config.extraction);
      auto& row = cache[pi][s];
      row.reserve(fv.items.size());
      for (const auto& kv : fv.items) row.push_back(kv.second);
    }
  });

  // out-of-fold slice table, fold-major then cohort order
  std::vector<int> patient_fold(cohort.size());
  for (size_t pi = 0; pi < cohort.size(); ++pi)
    patient_fold[pi] = report.folds.fold(cohort[pi].patient_id);

  std::vector<std::vector<size_t>> fold_patients(config.k);
  for (size_t pi = 0; pi < cohort.size(); ++pi)
    fold_patients[patient_fold[pi]].push_back(pi);

  for (int f = 0; f < config.k; ++f)
    for (size_t pi : fold_patients[f])
      for (int s = 0; s < cohort[pi].slices(); ++s)
        report.slices.push_back({cohort[pi].patient_id, s, f, cohort[pi].label});

  // per-fold training/validation preparation
  std::vector<FoldData> folds(config.k);
  for (int f = 0; f < config.k; ++f) {
    FoldData& fd = folds[f];

    // training slices: originals from all other folds
    std::vector<LabeledSlice> train_slices;
    for (size_t pi = 0; pi < cohort.size(); ++pi) {
      if (patient_fold[pi] == f) continue;
      for (int s = 0; s < cohort[pi].slices(); ++s) {
        LabeledSlice slice;
        slice.patient_id = cohort[pi].patient_id;
        slice.label = cohort[pi].label;
        slice.slice_index = s;
        slice.image = cohort[pi].slice(s);
        train_slices.push_back(std::move(slice));
      }
    }

    bool has_pos = false, has_neg = false;
    for (const auto& s : train_slices) (s.label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
      fd.single_class_train = true;
      continue;
    }

    if (config.augment_training) {
      AugmentPolicy policy = config.augment;
      policy.seed = derive_seed(config.seed, "augment", static_cast<uint64_t>(f));
      train_slices = balance_cohort(train_slices, policy);
    }

    // features: cache for originals, fresh extraction for synthetic slices
    std::map<std::string, size_t> patient_index;
    for (size_t pi = 0; pi < cohort.size(); ++pi)
      patient_index[cohort[pi].patient_id] = pi;

    fd.x_train = Matrix(train_slices.size(), names.size());
    fd.y_train.resize(train_slices.size());
    parallel_for(train_slices.size(), [&](size_t i) {
      const LabeledSlice& slice = train_slices[i];
      fd.y_train[i] = slice.label;
      double* row = fd.x_train.row(i);
      if (!slice.provenance.synthetic) {
        const auto& cached =
            cache[patient_index.at(slice.patient_id)][slice.slice_index];
        std::copy(cached.begin(), cached.end(), row);
      } else {
        const auto& spacing = cohort[patient_index.at(slice.patient_id)].vox.spacing;
        FeatureVector fv = extract_slice_features(slice.image, spacing, config.extraction);
        for (size_t c = 0; c < fv.items.size(); ++c) row[c] = fv.items[c].second;
      }
    });

    auto [x_std, scaler] = standardize(fd.x_train);
    fd.x_train = std::move(x_std);

    // validation rows in report.slices order for this fold
    size_t n_val = 0;
    for (size_t pi : fold_patients[f]) n_val += cohort[pi].slices();
    fd.x_val = Matrix(n_val, names.size());
    fd.y_val.resize(n_val);
    size_t vr = 0;
    for (size_t pi : fold_patients[f]) {
      for (int s = 0; s < cohort[pi].slices(); ++s, ++vr) {
        const auto& cached = cache[pi][s];
        std::copy(cached.begin(), cached.end(), fd.x_val.row(vr));
        fd.y_val[vr] = cohort[pi].label;
      }
    }
    scaler.apply_in_place(fd.x_val);

    // LASSO selection on the (augmented) training features
    double lmax = lasso_lambda_max(fd.x_train, std::vector<double>(fd.y_train.begin(),
                                                                   fd.y_train.end()));
    auto grid = make_lambda_grid(lmax, config.lambda_count, config.lambda_min_ratio);
    fd.selection = select_features(
        fd.x_train, std::vector<double>(fd.y_train.begin(), fd.y_train.end()), names,
        grid, config.inner_folds, derive_seed(config.seed, "select", static_cast<uint64_t>(f)));

    FoldSelectionReport sel;
    sel.fold = f;
    sel.lambda = fd.selection.lambda;
    sel.used_fallback = fd.selection.used_fallback;
    sel.names = fd.selection.names;
    sel.grid = fd.selection.grid;
    sel.cv_mean_error = fd.selection.cv_mean_error;
    sel.cv_se = fd.selection.cv_se;
    report.selection.push_back(std::move(sel));
  }

  // slice row offsets per fold in report.slices
  std::vector<size_t> fold_offset(config.k + 1, 0);
  {
    size_t acc = 0;
    for (int f = 0; f < config.k; ++f) {
      fold_offset[f] = acc;
      for (size_t pi : fold_patients[f]) acc += cohort[pi].slices();
    }
    fold_offset[config.k] = acc;
  }

  std::vector<bool> arms;
  if (config.arm_with_selection) arms.push_back(true);
  if (config.arm_without_selection) arms.push_back(false);

  for (const ModelSpec& base_spec : config.models) {
    for (bool fs : arms) {
      ModelArmResult res;
      res.model = model_kind_name(base_spec.kind);
      res.feature_selection = fs;
      res.slice_scores.assign(report.slices.size(), 0.5);
      res.slice_predicted.assign(report.slices.size(), 0);

      std::vector<double> pooled_scores;
      std::vector<int> pooled_pred, pooled_truth;
      std::vector<std::string> pooled_pids;

      for (int f = 0; f < config.k; ++f) {
        FoldData& fd = folds[f];
        if (fd.single_class_train) {
          res.skipped_folds.push_back(f);
          continue;
        }

        Matrix x_train_arm, x_val_arm;
        std::vector<std::string> arm_names;
        if (fs && !fd.selection.indices.empty()) {
          x_train_arm = fd.x_train.select_columns(fd.selection.indices);
          x_val_arm = fd.x_val.select_columns(fd.selection.indices);
          arm_names = fd.selection.names;
        } else {
          x_train_arm = fd.x_train;
          x_val_arm = fd.x_val;
          arm_names = names;
        }

        ModelSpec spec = base_spec;
        spec.seed = derive_seed(config.seed, std::string("model_") + res.model,
                                static_cast<uint64_t>(f) * 2 + (fs ? 1 : 0));
        auto model = train_model(spec, x_train_arm, fd.y_train, arm_names);

        std::vector<double> scores = model->score_matrix(x_val_arm, arm_names);
        int correct = 0;
        for (size_t i = 0; i < scores.size(); ++i) {
          size_t row = fold_offset[f] + i;
          int pred = model->predict_row(x_val_arm.row(i), x_val_arm.cols);
          res.slice_scores[row] = scores[i];
          res.slice_predicted[row] = pred;
          if (pred == fd.y_val[i]) ++correct;

          pooled_scores.push_back(scores[i]);
          pooled_pred.push_back(pred);
          pooled_truth.push_back(fd.y_val[i]);
          pooled_pids.push_back(report.slices[row].patient_id);
        }
        res.evaluated_folds.push_back(f);
        res.fold_accuracy.push_back(static_cast<double>(correct) /
                                    static_cast<double>(scores.size()));
      }

      if (!res.fold_accuracy.empty()) {
        double mean = std::accumulate(res.fold_accuracy.begin(), res.fold_accuracy.end(),
                                      0.0) /
                      static_cast<double>(res.fold_accuracy.size());
        double var = 0.0;
        for (double a : res.fold_accuracy) var += (a - mean) * (a - mean);
        var /= static_cast<double>(res.fold_accuracy.size());
        res.accuracy_mean = mean;
        res.accuracy_variance = var;

        int64_t correct = 0;
        for (size_t i = 0; i < pooled_pred.size(); ++i)
          if (pooled_pred[i] == pooled_truth[i]) ++correct;
        res.pooled_slice_accuracy =
            static_cast<double>(correct) / static_cast<double>(pooled_pred.size());

        bool has_pos = false, has_neg = false;
        for (int t : pooled_truth) (t == 1 ? has_pos : has_neg) = true;
        if (has_pos && has_neg) {
          res.pooled_auc = roc_auc(pooled_scores, pooled_truth);
          res.auc_ci = bootstrap_ci(
              pooled_scores, pooled_truth, config.bootstrap_resamples,
              derive_seed(config.seed, std::string("ci_") + res.model, fs ? 1 : 0));
        }

        PatientAggregate agg = patient_aggregate(pooled_scores, pooled_pred,
                                                 pooled_truth, pooled_pids,
                                                 config.aggregate);
        res.patient_accuracy = agg.accuracy;
      }

      report.results.push_back(std::move(res));
    }
  }

  return report;
}

}  // namespace radpipe
