#include "pdthreat/corruptions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pdthreat/error.hpp"

namespace pdthreat {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

float clip01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

std::size_t at(const ImageGeometry& g, std::size_t r, std::size_t c, std::size_t ch) {
  return (r * g.width + c) * g.channels + ch;
}

}  // namespace

std::string_view style_name(CorruptionStyle s) {
  switch (s) {
    case CorruptionStyle::kGaussianNoise: return "gaussian_noise";
    case CorruptionStyle::kImpulseNoise: return "impulse_noise";
    case CorruptionStyle::kBoxBlur: return "box_blur";
    case CorruptionStyle::kBrightness: return "brightness";
    case CorruptionStyle::kContrast: return "contrast";
    case CorruptionStyle::kPixelate: return "pixelate";
    case CorruptionStyle::kCheckerboardCutout: return "checkerboard_cutout";
  }
  return "?";
}

CorruptionStyle parse_style(std::string_view name) {
  for (const auto s : kAllStyles) {
    if (style_name(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown corruption style '" + std::string(name) + "'");
}

std::string_view style_category(CorruptionStyle s) {
  switch (s) {
    case CorruptionStyle::kGaussianNoise:
    case CorruptionStyle::kImpulseNoise: return "noise";
    case CorruptionStyle::kBoxBlur: return "blur";
    case CorruptionStyle::kPixelate: return "compression";
    case CorruptionStyle::kBrightness:
    case CorruptionStyle::kContrast: return "digital";
    case CorruptionStyle::kCheckerboardCutout: return "occlusion";
  }
  return "?";
}

ImageGeometry default_geometry(std::size_t dim) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dim))));
  if (side * side == dim) return {side, side, 1};
  return {1, dim, 1};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

double severity_parameter(CorruptionStyle style, int severity) {
  if (severity < 1 || severity > 5) {
    throw Error(ErrorCode::kInvalidArgument,
                "severity must be in 1..5, got " + std::to_string(severity));
  }
  const double s = severity;
  switch (style) {
    case CorruptionStyle::kGaussianNoise: return 0.04 * s;       // sigma
    case CorruptionStyle::kImpulseNoise: return 0.03 * s;        // corrupted fraction
    case CorruptionStyle::kBoxBlur: return s;                    // window radius
    case CorruptionStyle::kBrightness: return 0.1 * s;           // additive shift
    case CorruptionStyle::kContrast: return 1.0 - 0.15 * s;      // contrast factor
    case CorruptionStyle::kPixelate: return s + 1.0;             // block size
    case CorruptionStyle::kCheckerboardCutout: return s + 1.0;   // tile size
  }
  return 0.0;
}

std::vector<float> apply_corruption(const CorruptionSpec& spec, std::span<const float> x) {
  const ImageGeometry& g = spec.geometry;
  if (g.size() != x.size() || g.size() == 0) {
    throw Error(ErrorCode::kGeometryMismatch,
                "geometry " + std::to_string(g.height) + "x" + std::to_string(g.width) + "x" +
                    std::to_string(g.channels) + " does not match d = " +
                    std::to_string(x.size()));
  }
  for (const float v : x) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorCode::kNotImageDomain, "corruptions need inputs in [0,1]");
    }
  }
  const double param = severity_parameter(spec.style, spec.severity);
  std::vector<float> out(x.begin(), x.end());
  std::mt19937_64 rng(spec.seed);

  switch (spec.style) {
    case CorruptionStyle::kGaussianNoise: {
      std::normal_distribution<double> noise(0.0, param);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = clip01(x[i] + noise(rng));
      break;
    }
    case CorruptionStyle::kImpulseNoise: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (auto& v : out) {
        const double r = coin(rng);
        if (r < param) v = (r < 0.5 * param) ? 0.0f : 1.0f;
      }
      break;
    }
    case CorruptionStyle::kBoxBlur: {
      const auto radius = static_cast<long>(param);
      for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
          for (std::size_t ch = 0; ch < g.channels; ++ch) {
            double sum = 0.0;
            std::size_t count = 0;
            for (long dr = -radius; dr <= radius; ++dr) {
              for (long dc = -radius; dc <= radius; ++dc) {
                const long rr = static_cast<long>(r) + dr;
                const long cc = static_cast<long>(c) + dc;
                if (rr < 0 || cc < 0 || rr >= static_cast<long>(g.height) ||
                    cc >= static_cast<long>(g.width)) {
                  continue;
                }
                sum += x[at(g, static_cast<std::size_t>(rr), static_cast<std::size_t>(cc), ch)];
                ++count;
              }
            }
            out[at(g, r, c, ch)] = clip01(sum / static_cast<double>(count));
          }
        }
      }
      break;
    }
    case CorruptionStyle::kBrightness:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = clip01(x[i] + param);
      break;
    case CorruptionStyle::kContrast: {
      double mean = 0.0;
      for (const float v : x) mean += v;
      mean /= static_cast<double>(x.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = clip01((x[i] - mean) * param + mean);
      }
      break;
    }
    case CorruptionStyle::kPixelate: {
      const auto block = static_cast<std::size_t>(param);
      for (std::size_t r0 = 0; r0 < g.height; r0 += block) {
        for (std::size_t c0 = 0; c0 < g.width; c0 += block) {
          const std::size_t r1 = std::min(g.height, r0 + block);
          const std::size_t c1 = std::min(g.width, c0 + block);
          for (std::size_t ch = 0; ch < g.channels; ++ch) {
            double sum = 0.0;
            for (std::size_t r = r0; r < r1; ++r) {
              for (std::size_t c = c0; c < c1; ++c) sum += x[at(g, r, c, ch)];
            }
            const float mean = clip01(sum / static_cast<double>((r1 - r0) * (c1 - c0)));
            for (std::size_t r = r0; r < r1; ++r) {
              for (std::size_t c = c0; c < c1; ++c) out[at(g, r, c, ch)] = mean;
            }
          }
        }
      }
      break;
    }
    case CorruptionStyle::kCheckerboardCutout: {
      const auto tile = static_cast<std::size_t>(param);
      for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
          if ((r / tile + c / tile) % 2 != 0) continue;
          for (std::size_t ch = 0; ch < g.channels; ++ch) out[at(g, r, c, ch)] = 0.0f;
        }
      }
      break;
    }
  }
  return out;
}

LabeledDataset corrupt_dataset(const LabeledDataset& inputs, CorruptionStyle style,
                               int severity, std::uint64_t seed, ImageGeometry geometry) {
  if (!inputs.image_domain) {
    throw Error(ErrorCode::kNotImageDomain, "input dataset is not flagged image_domain");
  }
  LabeledDataset out = inputs;
  for (std::size_t i = 0; i < inputs.n; ++i) {
    const CorruptionSpec spec{style, severity, mix_seed(seed, i), geometry};
    const auto row = apply_corruption(spec, inputs.row(i));
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace pdthreat
