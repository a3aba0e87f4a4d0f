#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gftmark/attacks.hpp"
#include "gftmark/metrics.hpp"
#include "gftmark/watermark.hpp"

namespace gftmark {

struct NamedClip {
  std::string label;
  AudioClip clip;
};

/// Attack parameters of the robustness suite; defaults are the reference
/// experimental settings.
struct SuiteOptions {
  std::vector<double> awgn_snr_db{10.0, 20.0};
  double lowpass_cutoff_hz = 11025.0;
  double resample_rate_hz = 22050.0;
  int requantize_bits = 8;
  std::vector<double> gains{1.5, 2.0};
  int mp3_bitrate_kbps = 128;
  std::vector<double> tsm_percent{1.0, 10.0, -1.0, -10.0};
  std::vector<std::size_t> crop_frames{5, 10, 20};
};

/// No-attack control first, then common attacks, then synchronization
/// attacks (front crops before back crops).
std::vector<AttackSpec> standard_suite(const SuiteOptions& opts = {});

struct EvaluationConfig {
  SchemeConfig scheme;
  std::vector<AttackSpec> attacks = standard_suite();
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<Mp3Codec> mp3;
  bool dump_features = false;
  std::size_t dump_clip = 0;  // index into the clip list
};

/// Per-frame feature traces of one clip: "clean" first, then one per attack.
struct FeatureDump {
  std::string clip;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> traces;
};

struct EvaluationOutput {
  std::vector<EvalResult> results;  // clip-major, attacks in suite order
  std::optional<FeatureDump> features;
};

/// Seed of one (clip, attack) cell.
std::uint64_t cell_seed(std::uint64_t global_seed, const std::string& clip, const std::string& attack);

/// Embed into every clip, then attack, extract and score every cell. Cells
/// run in parallel; failures are recorded per cell and do not stop the batch.
EvaluationOutput evaluate(std::span<const NamedClip> clips, const BitSequence& watermark,
                          const EvaluationConfig& cfg);

/// Pearson correlation coefficient.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace gftmark
