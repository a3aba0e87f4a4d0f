#include "gftmark/watermark.hpp"

#include <stdexcept>
#include <string>

#include "gftmark/error.hpp"
#include "gftmark/graph.hpp"
#include "gftmark/kmeans.hpp"

namespace gftmark {

namespace {

void require_same_length(const BitSequence& a, const BitSequence& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": bit sequence lengths differ (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

BitSequence xor_bits(const BitSequence& a, const BitSequence& b) {
  BitSequence out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.set(i, (a[i] ^ b[i]) != 0);
  }
  return out;
}

std::size_t common_frame_length(std::span<const std::span<const double>> frames) {
  if (frames.empty()) {
    throw DimensionError("extract_features: no frames");
  }
  const std::size_t n = frames.front().size();
  for (const auto& f : frames) {
    if (f.size() != n) {
      throw DimensionError("extract_features: frames differ in length");
    }
  }
  return n;
}

}  // namespace

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::uint8_t b : bits_) {
    if (b > 1) {
      throw std::invalid_argument("BitSequence: value " + std::to_string(b) + " is not a bit");
    }
  }
}

void SchemeConfig::validate() const {
  if (k < 1) {
    throw std::invalid_argument("shift order k must be >= 1");
  }
  if (watermark_length < 2) {
    throw std::invalid_argument("watermark length M must be >= 2");
  }
}

std::size_t frame_length(std::size_t len, std::size_t frame_count) {
  if (frame_count == 0) {
    throw DimensionError("frame count must be positive");
  }
  return len / frame_count;
}

std::vector<std::span<const double>> frame_signal(const AudioClip& clip, std::size_t frame_count) {
  const std::size_t n = frame_length(clip.size(), frame_count);
  if (n < 2) {
    throw DimensionError("clip of " + std::to_string(clip.size()) + " samples is too short for " +
                         std::to_string(frame_count) + " frames (frame length " +
                         std::to_string(n) + " < 2)");
  }
  std::vector<std::span<const double>> frames;
  frames.reserve(frame_count);
  const std::span<const double> all(clip.samples);
  for (std::size_t m = 0; m < frame_count; ++m) {
    frames.push_back(all.subspan(m * n, n));
  }
  return frames;
}

FeatureSequence extract_features(std::span<const std::span<const double>> frames, std::size_t k) {
  const std::size_t n = common_frame_length(frames);
  const GraphFourierTransform transform(ShiftOperator(n, k));
  FeatureSequence features(frames.size());
  const auto count = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    features[m] = transform.max_abs_coefficient(frames[m]);
  }
  return features;
}

namespace reference {

FeatureSequence extract_features(std::span<const std::span<const double>> frames, std::size_t k) {
  const std::size_t n = common_frame_length(frames);
  const GraphFourierTransform transform(ShiftOperator(n, k));
  FeatureSequence features;
  features.reserve(frames.size());
  for (const auto& frame : frames) {
    features.push_back(transform.max_abs_coefficient(frame));
  }
  return features;
}

}  // namespace reference

BitSequence binarize_features(std::span<const double> features, const KMeansOptions& opts) {
  return BitSequence(two_means(features, opts).labels);
}

BitSequence generate_key(const BitSequence& feature_bits, const BitSequence& watermark_bits) {
  require_same_length(feature_bits, watermark_bits, "generate_key");
  return xor_bits(feature_bits, watermark_bits);
}

BitSequence extract_watermark(const BitSequence& feature_bits, const BitSequence& key) {
  require_same_length(feature_bits, key, "extract_watermark");
  return xor_bits(feature_bits, key);
}

BitSequence image_to_bits(const BinaryImage& img) { return BitSequence(img.pixels()); }

BinaryImage bits_to_image(const BitSequence& bits, std::size_t width, std::size_t height) {
  if (width * height != bits.size()) {
    throw DimensionError("bits_to_image: " + std::to_string(width) + "x" + std::to_string(height) +
                         " image needs " + std::to_string(width * height) + " bits, got " +
                         std::to_string(bits.size()));
  }
  BinaryImage img(width, height);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    img.set(i / width, i % width, bits[i] != 0);
  }
  return img;
}

BitSequence feature_bits(const AudioClip& clip, const SchemeConfig& cfg) {
  cfg.validate();
  const auto frames = frame_signal(clip, cfg.watermark_length);
  const FeatureSequence features = extract_features(frames, cfg.k);
  return binarize_features(features, cfg.kmeans);
}

BitSequence embed(const AudioClip& clip, const BitSequence& watermark, const SchemeConfig& cfg) {
  if (watermark.size() != cfg.watermark_length) {
    throw DimensionError("embed: watermark has " + std::to_string(watermark.size()) +
                         " bits but M=" + std::to_string(cfg.watermark_length));
  }
  return generate_key(feature_bits(clip, cfg), watermark);
}

BitSequence embed(const AudioClip& clip, const BinaryImage& watermark, const SchemeConfig& cfg) {
  return embed(clip, image_to_bits(watermark), cfg);
}

BitSequence extract_bits(const AudioClip& clip, const BitSequence& key, const SchemeConfig& cfg) {
  if (key.size() != cfg.watermark_length) {
    throw DimensionError("extract: key has " + std::to_string(key.size()) + " bits but M=" +
                         std::to_string(cfg.watermark_length));
  }
  return extract_watermark(feature_bits(clip, cfg), key);
}

BinaryImage extract(const AudioClip& clip, const BitSequence& key, const SchemeConfig& cfg,
                    std::size_t width, std::size_t height) {
  return bits_to_image(extract_bits(clip, key, cfg), width, height);
}

}  // namespace gftmark
