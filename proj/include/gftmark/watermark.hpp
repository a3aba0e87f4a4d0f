#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gftmark {

/// Mono host signal.
struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 44100.0;

  std::size_t size() const { return samples.size(); }
};

/// Sequence of 0/1 values: feature bits B, watermark bits W, key K.
class BitSequence {
 public:
  BitSequence() = default;
  explicit BitSequence(std::size_t n) : bits_(n, 0) {}
  /// Throws std::invalid_argument if any value is not 0 or 1.
  explicit BitSequence(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  const std::vector<std::uint8_t>& values() const { return bits_; }

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Binary image, row-major, top-left first. Pixel 1 is black.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(std::size_t width, std::size_t height) : width_(width), height_(height), pixels_(width * height, 0) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  void set(std::size_t row, std::size_t col, bool v) { pixels_[row * width_ + col] = v ? 1 : 0; }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-9;  // relative centroid movement
};

struct SchemeConfig {
  std::size_t k = 3;
  std::size_t watermark_length = 4096;  // M
  KMeansOptions kmeans;

  /// Throws std::invalid_argument unless k >= 1 and M >= 2.
  void validate() const;
};

/// Per-frame max-|coefficient| values.
using FeatureSequence = std::vector<double>;

/// M equal non-overlapping views into clip.samples; the trailing
/// len - M*N samples are dropped. Throws DimensionError if N < 2.
std::vector<std::span<const double>> frame_signal(const AudioClip& clip, std::size_t frame_count);

/// Frame length used when splitting len samples into frame_count frames.
std::size_t frame_length(std::size_t len, std::size_t frame_count);

/// Max |GFT coefficient| of every frame; frames are processed in parallel.
FeatureSequence extract_features(std::span<const std::span<const double>> frames, std::size_t k);

/// Two-class 1-D K-means, larger centroid coded 1.
BitSequence binarize_features(std::span<const double> features, const KMeansOptions& opts = {});

BitSequence generate_key(const BitSequence& feature_bits, const BitSequence& watermark_bits);
BitSequence extract_watermark(const BitSequence& feature_bits, const BitSequence& key);

BitSequence image_to_bits(const BinaryImage& img);
BinaryImage bits_to_image(const BitSequence& bits, std::size_t width, std::size_t height);

/// Feature bits B of a clip under cfg (framing, GFT features, K-means).
BitSequence feature_bits(const AudioClip& clip, const SchemeConfig& cfg);

/// Zero-watermark key K = B xor W. The clip is only read.
BitSequence embed(const AudioClip& clip, const BinaryImage& watermark, const SchemeConfig& cfg);
BitSequence embed(const AudioClip& clip, const BitSequence& watermark, const SchemeConfig& cfg);

/// Recovered watermark bits W' = B' xor K; the clip is re-framed with its
/// own length.
BitSequence extract_bits(const AudioClip& clip, const BitSequence& key, const SchemeConfig& cfg);
BinaryImage extract(const AudioClip& clip, const BitSequence& key, const SchemeConfig& cfg,
                    std::size_t width, std::size_t height);

namespace reference {

/// Serial feature extraction; the parallel path must match it bit for bit.
FeatureSequence extract_features(std::span<const std::span<const double>> frames, std::size_t k);

}  // namespace reference

}  // namespace gftmark
