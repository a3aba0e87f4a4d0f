#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gftmark/metrics.hpp"
#include "gftmark/watermark.hpp"

namespace gftmark {

using Bytes = std::vector<std::uint8_t>;

/// Round x * 2^(bits-1) to the nearest integer and clamp to the signed
/// bits-wide range. The 16-bit case is the WAV sample mapping.
std::int32_t quantize_sample(double x, int bits);

// --- WAV (RIFF, PCM 16-bit) ---

/// Mono or stereo PCM16 RIFF/WAVE. Stereo is averaged to mono; samples are
/// int / 32768. Throws FormatError naming the offending chunk.
AudioClip parse_wav(std::span<const std::uint8_t> bytes);
/// Mono PCM16; samples clamped to [-1, 1 - 2^-15] before scaling.
Bytes serialize_wav(const AudioClip& clip);

AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

// --- PBM ---

enum class PbmFormat { ascii, binary };  // P1, P4

BinaryImage parse_pbm(std::span<const std::uint8_t> bytes);
Bytes serialize_pbm(const BinaryImage& img, PbmFormat format = PbmFormat::ascii);

BinaryImage read_pbm(const std::filesystem::path& path);
void write_pbm(const BinaryImage& img, const std::filesystem::path& path,
               PbmFormat format = PbmFormat::ascii);

// --- Key file ---
//
// "GZWK" | version (1 byte, = 1) | M (uint32 big-endian) | k (1 byte) |
// ceil(M/8) payload bytes, MSB first, zero padding bits.

struct WatermarkKey {
  BitSequence bits;
  std::uint8_t k = 3;

  friend bool operator==(const WatermarkKey&, const WatermarkKey&) = default;
};

inline constexpr std::uint8_t kKeyFileVersion = 1;

Bytes serialize_key(const BitSequence& key, std::size_t k);
WatermarkKey parse_key(std::span<const std::uint8_t> bytes);

void write_key(const BitSequence& key, std::size_t k, const std::filesystem::path& path);
WatermarkKey read_key(const std::filesystem::path& path);

// --- Evaluation report ---

/// CSV: clip,attack,parameters,ber,nc,status, one row per result in the
/// given order, then one "mean" row per attack (first-appearance order)
/// averaged over its ok cells.
std::string format_report(std::span<const EvalResult> results);
void write_report(std::span<const EvalResult> results, const std::filesystem::path& path);

/// CSV with a frame column and one column per trace.
void write_feature_traces(const std::filesystem::path& path, std::span<const std::string> labels,
                          std::span<const std::vector<double>> traces);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace gftmark
