#pragma once

#include <cstdint>

#include "gftmark/watermark.hpp"

namespace gftmark {

struct SynthOptions {
  double duration_s = 64.0;
  double sample_rate = 44100.0;
  std::uint64_t seed = 1;
};

/// Deterministic music-like test signal: sections of a few seconds, each a
/// chord of harmonic tones re-struck on a beat with decaying envelopes and its
/// own loudness, plus low-level noise. Peak 0.45, so a x2 gain does not clip.
AudioClip synthesize_music(const SynthOptions& opts);

}  // namespace gftmark
