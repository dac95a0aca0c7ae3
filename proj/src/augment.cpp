#include "radpipe/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "radpipe/error.hpp"
#include "radpipe/rng.hpp"

namespace radpipe {

const char* transform_kind_name(TransformKind k) {
  switch (k) {
    case TransformKind::Rotate: return "rotate";
    case TransformKind::Flip: return "flip";
    case TransformKind::Noise: return "noise";
    case TransformKind::Gamma: return "gamma";
  }
  return "?";
}

std::string Transform::describe() const {
  char buf[64];
  switch (kind) {
    case TransformKind::Rotate:
      std::snprintf(buf, sizeof(buf), "rotate(%.3g)", angle_deg);
      break;
    case TransformKind::Flip:
      std::snprintf(buf, sizeof(buf), "flip(%s)", flip_axis == 0 ? "v" : "h");
      break;
    case TransformKind::Noise:
      std::snprintf(buf, sizeof(buf), "noise(%.3g)", noise_sigma);
      break;
    case TransformKind::Gamma:
      std::snprintf(buf, sizeof(buf), "gamma(%.3g)", gamma);
      break;
  }
  return buf;
}

namespace {

bool is_quarter_turn(double angle) {
  return angle == 90.0 || angle == 180.0 || angle == 270.0;
}

Image rotate_quarter(const Image& img, int quarter_turns) {
  const int n = img.side;
  Image out(n);
  switch (quarter_turns & 3) {
    case 1:  // 90 degrees: (r, c) <- (c, n-1-r)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.at(r, c) = img.at(c, n - 1 - r);
      break;
    case 2:
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.at(r, c) = img.at(n - 1 - r, n - 1 - c);
      break;
    case 3:
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.at(r, c) = img.at(n - 1 - c, r);
      break;
    default:
      out = img;
  }
  return out;
}

Image rotate_bilinear(const Image& img, double angle_deg) {
  const int n = img.side;
  Image out(n);
  const double rad = angle_deg * 3.14159265358979323846 / 180.0;
  const double ca = std::cos(rad), sa = std::sin(rad);
  const double cc = (n - 1) / 2.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // inverse-map output pixel into the source image
      double dy = r - cc, dx = c - cc;
      double sy = ca * dy + sa * dx + cc;
      double sx = -sa * dy + ca * dx + cc;
      int y0 = static_cast<int>(std::floor(sy));
      int x0 = static_cast<int>(std::floor(sx));
      double fy = sy - y0, fx = sx - x0;
      double acc = 0.0;
      for (int oy = 0; oy <= 1; ++oy) {
        for (int ox = 0; ox <= 1; ++ox) {
          int yy = y0 + oy, xx = x0 + ox;
          double wgt = (oy ? fy : 1.0 - fy) * (ox ? fx : 1.0 - fx);
          if (yy >= 0 && yy < n && xx >= 0 && xx < n) acc += wgt * img.at(yy, xx);
          // zero fill outside
        }
      }
      double v = std::nearbyint(acc);
      out.at(r, c) = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return out;
}

Image flip(const Image& img, int axis) {
  const int n = img.side;
  Image out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out.at(r, c) = axis == 0 ? img.at(n - 1 - r, c) : img.at(r, n - 1 - c);
  return out;
}

Image add_noise(const Image& img, double sigma, uint64_t seed) {
  Image out = img;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (auto& v : out.px) {
    double nv = v + sigma * rng.normal();
    nv = std::nearbyint(nv);
    v = static_cast<uint8_t>(std::clamp(nv, 0.0, 255.0));
  }
  return out;
}

Image gamma_map(const Image& img, double g) {
  uint8_t lut[256];
  for (int v = 0; v < 256; ++v) {
    double mapped = 255.0 * std::pow(v / 255.0, g);
    lut[v] = static_cast<uint8_t>(std::clamp(std::nearbyint(mapped), 0.0, 255.0));
  }
  Image out = img;
  for (auto& v : out.px) v = lut[v];
  return out;
}

void validate(const Transform& t) {
  switch (t.kind) {
    case TransformKind::Rotate: {
      if (!is_quarter_turn(t.angle_deg) && std::abs(t.angle_deg) > 15.0)
        fail(ErrorCode::BadArgument, "augment: rotation angle out of range");
      break;
    }
    case TransformKind::Flip:
      if (t.flip_axis != 0 && t.flip_axis != 1)
        fail(ErrorCode::BadArgument, "augment: flip axis must be 0 or 1");
      break;
    case TransformKind::Noise:
      if (t.noise_sigma < 0.0)
        fail(ErrorCode::BadArgument, "augment: noise sigma must be >= 0");
      break;
    case TransformKind::Gamma:
      if (t.gamma < 0.7 || t.gamma > 1.5)
        fail(ErrorCode::BadArgument, "augment: gamma must be in [0.7, 1.5]");
      break;
  }
}

Transform random_transform(TransformKind kind, const AugmentPolicy& policy, Rng& rng) {
  Transform t;
  t.kind = kind;
  switch (kind) {
    case TransformKind::Rotate:
      if (rng.uniform() < 0.5) {
        static const double quarters[3] = {90.0, 180.0, 270.0};
        t.angle_deg = quarters[rng.uniform_int(3)];
      } else {
        t.angle_deg = rng.uniform(-policy.max_angle_deg, policy.max_angle_deg);
      }
      break;
    case TransformKind::Flip:
      t.flip_axis = static_cast<int>(rng.uniform_int(2));
      break;
    case TransformKind::Noise:
      t.noise_sigma = policy.noise_sigma;
      break;
    case TransformKind::Gamma:
      t.gamma = rng.uniform(policy.gamma_min, policy.gamma_max);
      break;
  }
  return t;
}

LabeledSlice make_synthetic(const LabeledSlice& src, const Transform& t, uint64_t seed) {
  LabeledSlice out;
  out.patient_id = src.patient_id;  // provenance never crosses patients
  out.label = src.label;
  out.slice_index = src.slice_index;
  out.image = apply_transform(src.image, t, seed);
  out.provenance.synthetic = true;
  out.provenance.source_slice = src.slice_index;
  out.provenance.transform_chain =
      src.provenance.synthetic
          ? src.provenance.transform_chain + "|" + t.describe()
          : t.describe();
  out.provenance.seed = seed;
  return out;
}

}  // namespace

Image apply_transform(const Image& img, const Transform& t, uint64_t seed) {
  if (img.side <= 0 || img.px.size() != static_cast<size_t>(img.side) * img.side)
    fail(ErrorCode::BadArgument, "augment: image must be square");
  validate(t);
  switch (t.kind) {
    case TransformKind::Rotate:
      if (t.angle_deg == 0.0) return img;
      if (is_quarter_turn(t.angle_deg))
        return rotate_quarter(img, static_cast<int>(t.angle_deg / 90.0));
      return rotate_bilinear(img, t.angle_deg);
    case TransformKind::Flip:
      return flip(img, t.flip_axis);
    case TransformKind::Noise:
      return add_noise(img, t.noise_sigma, seed);
    case TransformKind::Gamma:
      return gamma_map(img, t.gamma);
  }
  return img;
}

std::vector<LabeledSlice> balance_cohort(const std::vector<LabeledSlice>& slices,
                                         const AugmentPolicy& policy) {
  if (!(policy.target_ratio > 0.0 && policy.target_ratio <= 1.0))
    fail(ErrorCode::BadArgument, "augment: target ratio must be in (0, 1]");
  if (policy.max_angle_deg <= 0.0 || policy.max_angle_deg > 15.0)
    fail(ErrorCode::BadArgument, "augment: max rotation angle must be in (0, 15]");
  if (policy.gamma_min < 0.7 || policy.gamma_max > 1.5 || policy.gamma_min > policy.gamma_max)
    fail(ErrorCode::BadArgument, "augment: gamma range must lie inside [0.7, 1.5]");
  if (policy.noise_sigma < 0.0)
    fail(ErrorCode::BadArgument, "augment: noise sigma must be >= 0");

  size_t n_pos = 0, n_neg = 0;
  for (const auto& s : slices) (s.label ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    fail(ErrorCode::SingleClass, "augment: both classes required for balancing");

  const int minority_label = n_pos <= n_neg ? 1 : 0;
  const size_t n_min = std::min(n_pos, n_neg);
  const size_t n_maj = std::max(n_pos, n_neg);

  std::vector<LabeledSlice> out = slices;
  Rng rng(policy.seed);

  static const TransformKind kAllKinds[4] = {TransformKind::Rotate, TransformKind::Flip,
                                             TransformKind::Noise, TransformKind::Gamma};

  // Majority: one randomly selected transform per original slice.
  const size_t majority_total = 2 * n_maj;
  for (const auto& s : slices) {
    if (s.label == minority_label) continue;
    TransformKind kind = kAllKinds[rng.uniform_int(4)];
    Transform t = random_transform(kind, policy, rng);
    out.push_back(make_synthetic(s, t, rng.next_u64()));
  }

  // Minority: rounds of all four kinds per source slice (fresh parameters)
  // until the class ratio reaches the target against the final majority
  // count. The loop stops between sources, so overshoot is at most 4 slices.
  size_t minority_total = n_min;
  auto reached = [&] {
    return static_cast<double>(minority_total) >=
           policy.target_ratio * static_cast<double>(majority_total);
  };
  while (!reached()) {
    bool progressed = false;
    for (const auto& s : slices) {
      if (s.label != minority_label) continue;
      for (TransformKind kind : kAllKinds) {
        Transform t = random_transform(kind, policy, rng);
        out.push_back(make_synthetic(s, t, rng.next_u64()));
        ++minority_total;
      }
      progressed = true;
      if (reached()) break;
    }
    if (!progressed) break;  // unreachable: both classes present
  }
  return out;
}

}  // namespace radpipe
