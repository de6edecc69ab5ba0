#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pdthreat/data_model.hpp"

namespace pdthreat {

enum class CorruptionStyle {
  kGaussianNoise,
  kImpulseNoise,
  kBoxBlur,
  kBrightness,
  kContrast,
  kPixelate,
  kCheckerboardCutout,
};

inline constexpr std::array<CorruptionStyle, 7> kAllStyles = {
    CorruptionStyle::kGaussianNoise, CorruptionStyle::kImpulseNoise,
    CorruptionStyle::kBoxBlur,       CorruptionStyle::kBrightness,
    CorruptionStyle::kContrast,      CorruptionStyle::kPixelate,
    CorruptionStyle::kCheckerboardCutout,
};

std::string_view style_name(CorruptionStyle s);
CorruptionStyle parse_style(std::string_view name);
// noise, blur, compression, digital, occlusion
std::string_view style_category(CorruptionStyle s);

// Height x width x channels, channels fastest (HWC).
struct ImageGeometry {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::size_t size() const { return height * width * channels; }
};

// Square single-channel geometry when d is a perfect square, else 1 x d.
ImageGeometry default_geometry(std::size_t dim);

struct CorruptionSpec {
  CorruptionStyle style = CorruptionStyle::kGaussianNoise;
  int severity = 1;  // 1..5
  std::uint64_t seed = 0;
  ImageGeometry geometry;
};

// Severity -> generator parameter. Noise sigma, impulse rate, blur radius,
// brightness shift, contrast factor, pixel block size, cutout tile size.
double severity_parameter(CorruptionStyle style, int severity);

// Deterministic given (spec, x); output clipped to [0,1].
std::vector<float> apply_corruption(const CorruptionSpec& spec, std::span<const float> x);

// Applies the style to every row; row i uses a seed mixed from (seed, i).
LabeledDataset corrupt_dataset(const LabeledDataset& inputs, CorruptionStyle style,
                               int severity, std::uint64_t seed, ImageGeometry geometry);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pdthreat
