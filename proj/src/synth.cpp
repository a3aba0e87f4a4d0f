#include "gftmark/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gftmark/random.hpp"

namespace gftmark {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPeak = 0.45;
constexpr double kNoiseLevel = 0.001;
constexpr double kFade = 0.03;    // section crossfade, seconds
constexpr double kAttack = 0.01;  // note attack, seconds

struct Partial {
  double freq;
  double amp;
  double phase;
};

struct Note {
  std::vector<Partial> partials;
  double decay;   // seconds
  double offset;  // strike delay within each beat, seconds
};

struct Section {
  std::size_t begin;
  std::size_t end;
  double level;
  double beat;
  std::vector<Note> notes;
};

// Chord shapes in semitones above the root.
constexpr int kChords[][4] = {{0, 4, 7, 12}, {0, 3, 7, 10}, {0, 5, 7, 12}, {0, 4, 7, 11}, {0, 7, 12, 16}};

std::vector<Section> plan_sections(const SynthOptions& opts, SplitMix64& rng, std::size_t total) {
  std::vector<Section> sections;
  std::size_t pos = 0;
  while (pos < total) {
    Section s;
    const auto len = static_cast<std::size_t>(rng.uniform(1.5, 5.0) * opts.sample_rate);
    s.begin = pos;
    s.end = std::min(total, pos + len);
    s.level = std::pow(10.0, rng.uniform(-14.0, 0.0) / 20.0);
    s.beat = rng.uniform(0.2, 0.6);

    const int root = rng.uniform_int(40, 64);
    const auto& chord = kChords[rng.uniform_int(0, 4)];
    const int voices = rng.uniform_int(2, 4);
    for (int v = 0; v < voices; ++v) {
      Note note;
      const double f0 = 440.0 * std::pow(2.0, (root + chord[v] - 69) / 12.0);
      const int harmonics = rng.uniform_int(3, 6);
      for (int h = 1; h <= harmonics; ++h) {
        if (f0 * h >= 0.45 * opts.sample_rate) {
          break;
        }
        note.partials.push_back({f0 * h, rng.uniform(0.5, 1.0) / h, rng.uniform(0.0, kTwoPi)});
      }
      note.decay = rng.uniform(0.15, 0.8);
      note.offset = rng.uniform(0.0, 0.05);
      s.notes.push_back(std::move(note));
    }
    sections.push_back(std::move(s));
    pos = sections.back().end;
  }
  return sections;
}

double note_envelope(double t, const Note& note, double beat) {
  const double local = t - note.offset;
  if (local < 0.0) {
    return 0.25;
  }
  const double since_strike = std::fmod(local, beat);
  const double strike = since_strike < kAttack ? since_strike / kAttack
                                               : std::exp(-(since_strike - kAttack) / note.decay);
  return 0.25 + 0.75 * strike;
}

double section_sample(const Section& s, std::size_t i, double rate) {
  const double t_abs = static_cast<double>(i) / rate;
  const double t = static_cast<double>(i - s.begin) / rate;
  const double remaining = static_cast<double>(s.end - i) / rate;
  const double edge = std::min({1.0, t / kFade, remaining / kFade});
  const double fade = 0.5 - 0.5 * std::cos(std::numbers::pi * edge);

  double acc = 0.0;
  for (const Note& note : s.notes) {
    double tone = 0.0;
    for (const Partial& p : note.partials) {
      tone += p.amp * std::sin(kTwoPi * p.freq * t_abs + p.phase);
    }
    acc += tone * note_envelope(t, note, s.beat);
  }
  return acc * s.level * fade;
}

}  // namespace

AudioClip synthesize_music(const SynthOptions& opts) {
  if (!(opts.duration_s > 0.0) || !(opts.sample_rate > 0.0)) {
    throw std::invalid_argument("synthesize_music: duration and sample rate must be positive");
  }
  const auto total = static_cast<std::size_t>(std::llround(opts.duration_s * opts.sample_rate));
  SplitMix64 rng(mix64(opts.seed));
  const std::vector<Section> sections = plan_sections(opts, rng, total);

  AudioClip clip{std::vector<double>(total, 0.0), opts.sample_rate};
  for (const Section& s : sections) {
    const auto begin = static_cast<std::ptrdiff_t>(s.begin);
    const auto end = static_cast<std::ptrdiff_t>(s.end);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      clip.samples[i] = section_sample(s, static_cast<std::size_t>(i), opts.sample_rate);
    }
  }

  double peak = 0.0;
  for (double v : clip.samples) {
    peak = std::max(peak, std::abs(v));
  }
  const double gain = peak > 0.0 ? kPeak / peak : 0.0;
  const std::uint64_t noise_seed = mix64(opts.seed ^ 0x6e6f697365ULL);
  const auto n = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    clip.samples[i] = clip.samples[i] * gain + kNoiseLevel * gaussian_at(noise_seed, static_cast<std::uint64_t>(i));
  }
  return clip;
}

}  // namespace gftmark
