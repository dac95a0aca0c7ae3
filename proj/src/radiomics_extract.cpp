#include <cmath>

#include "radpipe/error.hpp"
#include "radpipe/radiomics.hpp"

namespace radpipe {

double FeatureVector::at(const std::string& name) const {
  for (const auto& kv : items)
    if (kv.first == name) return kv.second;
  fail(ErrorCode::BadArgument, "feature not found: " + name);
}

namespace {

void append_family(NamedValues& out, const char* prefix, NamedValues values) {
  for (auto& kv : values)
    out.emplace_back(std::string(prefix) + "_" + kv.first, kv.second);
}

}  // namespace

FeatureVector extract_all(const GrayVolume& stack, const ExtractionParams& p) {
  if (stack.voxels.empty())
    fail(ErrorCode::BadArgument, "extract_all: empty stack");

  DiscreteStack d = discretize(stack, p);

  FeatureVector fv;
  fv.items.reserve(107);
  append_family(fv.items, "firstorder", first_order_features(stack, p));
  append_family(fv.items, "shape", shape_features(stack.dims, stack.spacing));
  append_family(fv.items, "glcm", glcm_features(d, p));
  append_family(fv.items, "gldm", gldm_features(d, p));
  append_family(fv.items, "glrlm", glrlm_features(d, p));
  append_family(fv.items, "glszm", glszm_features(d, p));
  append_family(fv.items, "ngtdm", ngtdm_features(d, p));

  if (fv.items.size() != 107)
    fail(ErrorCode::Internal,
         "extract_all: expected 107 features, got " + std::to_string(fv.items.size()));
  for (const auto& kv : fv.items)
    if (!std::isfinite(kv.second))
      fail(ErrorCode::Internal, "extract_all: non-finite feature " + kv.first);
  return fv;
}

const std::vector<std::string>& canonical_feature_names() {
  static const std::vector<std::string> names = [] {
    // evaluate once on a minimal stack; ordering is fixed by construction
    GrayVolume probe;
    probe.dims = {2, 2, 2};
    probe.spacing = {1.0, 1.0, 1.0};
    probe.voxels = {0, 10, 20, 30, 40, 50, 60, 70};
    ExtractionParams p;
    FeatureVector fv = extract_all(probe, p);
    std::vector<std::string> out;
    out.reserve(fv.items.size());
    for (const auto& kv : fv.items) out.push_back(kv.first);
    return out;
  }();
  return names;
}

}  // namespace radpipe
