#include "gftmark/evaluate.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "gftmark/error.hpp"
#include "gftmark/random.hpp"

namespace gftmark {

namespace {

struct CellOutcome {
  EvalResult result;
  std::vector<double> features;
};

FeatureSequence clip_features(const AudioClip& clip, const SchemeConfig& cfg) {
  return extract_features(frame_signal(clip, cfg.watermark_length), cfg.k);
}

}  // namespace

std::vector<AttackSpec> standard_suite(const SuiteOptions& opts) {
  std::vector<AttackSpec> suite{AttackSpec::no_attack()};
  for (double snr : opts.awgn_snr_db) {
    suite.push_back(AttackSpec::awgn_db(snr));
  }
  suite.push_back(AttackSpec::lowpass_hz(opts.lowpass_cutoff_hz));
  suite.push_back(AttackSpec::resample_via(opts.resample_rate_hz));
  suite.push_back(AttackSpec::requantize_bits(opts.requantize_bits));
  for (double g : opts.gains) {
    suite.push_back(AttackSpec::amplitude_gain(g));
  }
  suite.push_back(AttackSpec::mp3_kbps(opts.mp3_bitrate_kbps));
  for (double p : opts.tsm_percent) {
    suite.push_back(AttackSpec::tsm_percent(p));
  }
  for (CropEnd end : {CropEnd::front, CropEnd::back}) {
    for (std::size_t frames : opts.crop_frames) {
      suite.push_back(AttackSpec::crop_of(frames, end));
    }
  }
  return suite;
}

std::uint64_t cell_seed(std::uint64_t global_seed, const std::string& clip, const std::string& attack) {
  return derive_seed(global_seed, clip + "|" + attack);
}

EvaluationOutput evaluate(std::span<const NamedClip> clips, const BitSequence& watermark,
                          const EvaluationConfig& cfg) {
  if (clips.empty()) {
    throw std::invalid_argument("evaluate: no clips");
  }
  cfg.scheme.validate();
  if (watermark.size() != cfg.scheme.watermark_length) {
    throw DimensionError("evaluate: watermark length does not match M");
  }
  const int jobs = std::max(1, cfg.jobs);
  const auto clip_count = static_cast<std::ptrdiff_t>(clips.size());

  std::vector<BitSequence> keys(clips.size());
  std::vector<FeatureSequence> clean(clips.size());
  std::vector<std::string> embed_error(clips.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::ptrdiff_t c = 0; c < clip_count; ++c) {
    try {
      clean[c] = clip_features(clips[c].clip, cfg.scheme);
      keys[c] = generate_key(binarize_features(clean[c], cfg.scheme.kmeans), watermark);
    } catch (const std::exception& e) {
      embed_error[c] = std::string("embed: ") + e.what();
    }
  }

  const std::size_t attacks = cfg.attacks.size();
  const auto cells = static_cast<std::ptrdiff_t>(clips.size() * attacks);
  std::vector<CellOutcome> outcomes(static_cast<std::size_t>(cells));
  const Mp3Codec* codec = cfg.mp3 ? &*cfg.mp3 : nullptr;

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
    const std::size_t c = static_cast<std::size_t>(cell) / attacks;
    AttackSpec spec = cfg.attacks[static_cast<std::size_t>(cell) % attacks];
    const NamedClip& named = clips[c];
    CellOutcome& out = outcomes[static_cast<std::size_t>(cell)];
    out.result.clip = named.label;
    out.result.attack = spec.label();
    out.result.parameters = spec.parameters();
    if (!embed_error[c].empty()) {
      out.result.status = CellStatus::error;
      out.result.message = embed_error[c];
      continue;
    }
    try {
      spec.seed = cell_seed(cfg.seed, named.label, out.result.attack);
      const std::size_t frame_len = frame_length(named.clip.size(), cfg.scheme.watermark_length);
      const AudioClip attacked = apply_attack(spec, named.clip, frame_len, codec);
      out.features = clip_features(attacked, cfg.scheme);
      const BitSequence recovered =
          extract_watermark(binarize_features(out.features, cfg.scheme.kmeans), keys[c]);
      out.result.ber = ber(watermark, recovered);
      out.result.nc = nc(watermark, recovered);
    } catch (const AttackSkipped& e) {
      out.result.status = CellStatus::skipped;
      out.result.message = e.what();
    } catch (const std::exception& e) {
      out.result.status = CellStatus::error;
      out.result.message = e.what();
    }
  }

  EvaluationOutput output;
  output.results.reserve(outcomes.size());
  for (const CellOutcome& o : outcomes) {
    output.results.push_back(o.result);
  }
  if (cfg.dump_features && cfg.dump_clip < clips.size()) {
    FeatureDump dump;
    dump.clip = clips[cfg.dump_clip].label;
    dump.labels.push_back("clean");
    dump.traces.push_back(clean[cfg.dump_clip]);
    for (std::size_t a = 0; a < attacks; ++a) {
      CellOutcome& o = outcomes[cfg.dump_clip * attacks + a];
      if (o.result.status == CellStatus::ok) {
        dump.labels.push_back(o.result.attack);
        dump.traces.push_back(std::move(o.features));
      }
    }
    output.features = std::move(dump);
  }
  return output;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DimensionError("pearson: need two equal-length series of at least 2 values");
  }
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace gftmark
