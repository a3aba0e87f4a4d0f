// gftmark: GFT audio zero-watermarking command line.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gftmark/attacks.hpp"
#include "gftmark/evaluate.hpp"
#include "gftmark/io.hpp"
#include "gftmark/metrics.hpp"
#include "gftmark/random.hpp"
#include "gftmark/synth.hpp"
#include "gftmark/watermark.hpp"

namespace fs = std::filesystem;
using namespace gftmark;

namespace {

struct EmbedArgs {
  std::string audio, watermark, key;
  std::size_t k = 3;
};

struct ExtractArgs {
  std::string audio, key, out, reference;
  std::size_t width = 0, height = 0;
  bool binary_pbm = false;
};

struct AttackArgs {
  std::string in, out, type, end = "front", encoder, decoder;
  double snr = 20.0, cutoff = 11025.0, rate = 22050.0, gain = 1.0, percent = 0.0;
  int bits = 8, bitrate = 128;
  std::size_t frames = 0, frame_len = 0, watermark_length = 4096;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  std::string clips, watermark, out, dump_features, encoder, decoder;
  std::size_t k = 3;
  std::uint64_t seed = 0;
  int jobs = 1;
  SuiteOptions suite;
};

struct GenArgs {
  std::string out;
  double duration = 64.0, rate = 44100.0;
  std::uint64_t seed = 1;
  int count = 1;
};

std::string env_or(const char* name, const std::string& fallback) {
  if (!fallback.empty()) {
    return fallback;
  }
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::optional<Mp3Codec> mp3_codec(const std::string& encoder, const std::string& decoder) {
  Mp3Codec codec;
  codec.encoder = env_or("GFTMARK_MP3_ENCODER", encoder);
  codec.decoder = env_or("GFTMARK_MP3_DECODER", decoder);
  if (const char* t = std::getenv("GFTMARK_MP3_ENCODE_ARGS")) {
    codec.encode_template = t;
  }
  if (const char* t = std::getenv("GFTMARK_MP3_DECODE_ARGS")) {
    codec.decode_template = t;
  }
  if (codec.encoder.empty()) {
    return std::nullopt;
  }
  return codec;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw std::runtime_error(std::string(what) + " file not found: " + path);
  }
}

int run_embed(const EmbedArgs& a) {
  require_file(a.audio, "audio");
  require_file(a.watermark, "watermark");
  const AudioClip clip = read_wav(a.audio);
  const BinaryImage img = read_pbm(a.watermark);
  SchemeConfig cfg;
  cfg.k = a.k;
  cfg.watermark_length = img.width() * img.height();
  const BitSequence key = embed(clip, img, cfg);
  write_key(key, cfg.k, a.key);
  std::printf("M=%zu N=%zu k=%zu\n", cfg.watermark_length,
              frame_length(clip.size(), cfg.watermark_length), cfg.k);
  return 0;
}

int run_extract(const ExtractArgs& a) {
  require_file(a.audio, "audio");
  require_file(a.key, "key");
  const WatermarkKey key = read_key(a.key);
  std::size_t width = a.width;
  std::size_t height = a.height;
  const std::size_t m = key.bits.size();
  if (width == 0 && height == 0) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
    if (side * side != m) {
      throw std::runtime_error("key length " + std::to_string(m) +
                               " is not square; pass --width and --height");
    }
    width = height = side;
  } else if (width == 0) {
    width = height ? m / height : 0;
  } else if (height == 0) {
    height = m / width;
  }
  if (width * height != m) {
    throw std::runtime_error("image " + std::to_string(width) + "x" + std::to_string(height) +
                             " does not match key length " + std::to_string(m));
  }

  const AudioClip clip = read_wav(a.audio);
  SchemeConfig cfg;
  cfg.k = key.k;
  cfg.watermark_length = m;
  const BitSequence recovered = extract_bits(clip, key.bits, cfg);
  write_pbm(bits_to_image(recovered, width, height), a.out,
            a.binary_pbm ? PbmFormat::binary : PbmFormat::ascii);
  if (!a.reference.empty()) {
    require_file(a.reference, "reference watermark");
    const BitSequence original = image_to_bits(read_pbm(a.reference));
    std::printf("BER=%.6f NC=%.6f\n", ber(original, recovered), nc(original, recovered));
  }
  return 0;
}

int run_attack(const AttackArgs& a) {
  require_file(a.in, "audio");
  const AudioClip clip = read_wav(a.in);
  AttackSpec spec;
  spec.kind = parse_attack_kind(a.type);
  spec.snr_db = a.snr;
  spec.cutoff_hz = a.cutoff;
  spec.intermediate_rate_hz = a.rate;
  spec.bit_depth = a.bits;
  spec.gain = a.gain;
  spec.stretch_percent = a.percent;
  spec.crop_frames = a.frames;
  spec.end = parse_crop_end(a.end);
  spec.bitrate_kbps = a.bitrate;
  spec.seed = a.seed;

  const std::size_t frame_len =
      a.frame_len ? a.frame_len : frame_length(clip.size(), a.watermark_length);
  const auto codec = mp3_codec(a.encoder, a.decoder);
  const AudioClip attacked = apply_attack(spec, clip, frame_len, codec ? &*codec : nullptr);
  write_wav(attacked, a.out);

  std::ofstream sidecar(a.out + ".attack.txt", std::ios::trunc);
  sidecar << "kind=" << to_string(spec.kind) << ' ' << spec.parameters();
  if (spec.kind == AttackKind::crop) {
    sidecar << " frame_len=" << frame_len;
  }
  sidecar << " seed=" << spec.seed << '\n';
  std::printf("%s: %zu -> %zu samples\n", spec.label().c_str(), clip.size(), attacked.size());
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  require_file(a.watermark, "watermark");
  if (!fs::is_directory(a.clips)) {
    throw std::runtime_error("clip directory not found: " + a.clips);
  }
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(a.clips)) {
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (entry.is_regular_file() && ext == ".wav") {
      paths.push_back(entry.path());
    }
  }
  if (paths.empty()) {
    throw std::runtime_error("no .wav files in " + a.clips);
  }
  std::sort(paths.begin(), paths.end());

  std::vector<NamedClip> clips;
  for (const auto& p : paths) {
    clips.push_back({p.stem().string(), read_wav(p)});
  }
  const BinaryImage img = read_pbm(a.watermark);

  EvaluationConfig cfg;
  cfg.scheme.k = a.k;
  cfg.scheme.watermark_length = img.width() * img.height();
  cfg.attacks = standard_suite(a.suite);
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.mp3 = mp3_codec(a.encoder, a.decoder);
  cfg.dump_features = !a.dump_features.empty();

  const EvaluationOutput out = evaluate(clips, image_to_bits(img), cfg);
  write_report(out.results, a.out);
  if (out.features) {
    write_feature_traces(a.dump_features, out.features->labels, out.features->traces);
  }

  std::size_t failed = 0;
  for (const auto& r : out.results) {
    if (r.status == CellStatus::error) {
      ++failed;
      std::fprintf(stderr, "error: %s / %s: %s\n", r.clip.c_str(), r.attack.c_str(), r.message.c_str());
    }
  }
  std::printf("%zu clips x %zu attacks -> %s\n", clips.size(), cfg.attacks.size(), a.out.c_str());
  return failed == 0 ? 0 : 1;
}

int run_gen(const GenArgs& a) {
  if (a.count < 1) {
    throw std::runtime_error("--count must be >= 1");
  }
  if (a.count == 1) {
    write_wav(synthesize_music({a.duration, a.rate, a.seed}), a.out);
    return 0;
  }
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%02d.wav", i);
    const std::uint64_t seed = derive_seed(a.seed, name);
    write_wav(synthesize_music({a.duration, a.rate, seed}), fs::path(a.out) / name);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GFT-based audio zero-watermarking"};
  app.require_subcommand(1);

  EmbedArgs embed_args;
  auto* embed_cmd = app.add_subcommand("embed", "derive a watermark key from audio and a PBM image");
  embed_cmd->add_option("--audio", embed_args.audio, "host WAV")->required();
  embed_cmd->add_option("--watermark", embed_args.watermark, "binary watermark image (PBM)")->required();
  embed_cmd->add_option("--key", embed_args.key, "output key file")->required();
  embed_cmd->add_option("--k", embed_args.k, "shift order")->capture_default_str()->check(CLI::Range(1, 255));

  ExtractArgs extract_args;
  auto* extract_cmd = app.add_subcommand("extract", "recover the watermark image from audio and a key");
  extract_cmd->add_option("--audio", extract_args.audio, "possibly attacked WAV")->required();
  extract_cmd->add_option("--key", extract_args.key, "key file")->required();
  extract_cmd->add_option("--out", extract_args.out, "recovered PBM")->required();
  extract_cmd->add_option("--reference", extract_args.reference, "original watermark; prints BER/NC");
  extract_cmd->add_option("--width", extract_args.width, "image width (default: square)");
  extract_cmd->add_option("--height", extract_args.height, "image height (default: square)");
  extract_cmd->add_flag("--binary-pbm", extract_args.binary_pbm, "write P4 instead of P1");

  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "apply one attack to a WAV");
  attack_cmd->add_option("--in", attack_args.in, "input WAV")->required();
  attack_cmd->add_option("--out", attack_args.out, "output WAV")->required();
  attack_cmd->add_option("--type", attack_args.type,
                         "none|awgn|lowpass|resample|requantize|amplitude|tsm|crop|mp3")->required();
  attack_cmd->add_option("--snr", attack_args.snr, "AWGN SNR in dB")->capture_default_str();
  attack_cmd->add_option("--cutoff", attack_args.cutoff, "low-pass cutoff in Hz")->capture_default_str();
  attack_cmd->add_option("--rate", attack_args.rate, "intermediate sample rate in Hz")->capture_default_str();
  attack_cmd->add_option("--bits", attack_args.bits, "requantization depth")->capture_default_str();
  attack_cmd->add_option("--gain", attack_args.gain, "amplitude factor")->capture_default_str();
  attack_cmd->add_option("--percent", attack_args.percent, "TSM stretch in percent")->capture_default_str();
  attack_cmd->add_option("--frames", attack_args.frames, "frames to crop")->capture_default_str();
  attack_cmd->add_option("--end", attack_args.end, "crop end: front|back")->capture_default_str();
  attack_cmd->add_option("--frame-len", attack_args.frame_len,
                         "frame length N of the embedding (default: len / M)");
  attack_cmd->add_option("--m", attack_args.watermark_length, "watermark length M for the default frame length")
      ->capture_default_str();
  attack_cmd->add_option("--bitrate", attack_args.bitrate, "MP3 bitrate in kbps")->capture_default_str();
  attack_cmd->add_option("--seed", attack_args.seed, "noise seed")->capture_default_str();
  attack_cmd->add_option("--mp3-encoder", attack_args.encoder, "MP3 encoder (env GFTMARK_MP3_ENCODER)");
  attack_cmd->add_option("--mp3-decoder", attack_args.decoder, "MP3 decoder (env GFTMARK_MP3_DECODER)");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "run the attack suite over a directory of WAV clips");
  eval_cmd->add_option("--clips", eval_args.clips, "directory of WAV clips")->required();
  eval_cmd->add_option("--watermark", eval_args.watermark, "binary watermark image (PBM)")->required();
  eval_cmd->add_option("--out", eval_args.out, "CSV report")->required();
  eval_cmd->add_option("--k", eval_args.k, "shift order")->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "global seed")->capture_default_str();
  eval_cmd->add_option("--jobs", eval_args.jobs, "parallel evaluation cells")->capture_default_str();
  eval_cmd->add_option("--dump-features", eval_args.dump_features,
                       "CSV of per-frame feature traces for the first clip");
  eval_cmd->add_option("--awgn-snr", eval_args.suite.awgn_snr_db, "AWGN SNRs in dB")->capture_default_str();
  eval_cmd->add_option("--lowpass-cutoff", eval_args.suite.lowpass_cutoff_hz)->capture_default_str();
  eval_cmd->add_option("--resample-rate", eval_args.suite.resample_rate_hz)->capture_default_str();
  eval_cmd->add_option("--requantize-bits", eval_args.suite.requantize_bits)->capture_default_str();
  eval_cmd->add_option("--gains", eval_args.suite.gains, "amplitude factors")->capture_default_str();
  eval_cmd->add_option("--mp3-bitrate", eval_args.suite.mp3_bitrate_kbps)->capture_default_str();
  eval_cmd->add_option("--tsm", eval_args.suite.tsm_percent, "TSM stretches in percent")->capture_default_str();
  eval_cmd->add_option("--crop-frames", eval_args.suite.crop_frames, "crop sizes in frames")->capture_default_str();
  eval_cmd->add_option("--mp3-encoder", eval_args.encoder, "MP3 encoder (env GFTMARK_MP3_ENCODER)");
  eval_cmd->add_option("--mp3-decoder", eval_args.decoder, "MP3 decoder (env GFTMARK_MP3_DECODER)");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-audio", "write deterministic synthetic music-like WAV");
  gen_cmd->add_option("--out", gen_args.out, "output WAV, or directory when --count > 1")->required();
  gen_cmd->add_option("--duration", gen_args.duration, "seconds")->capture_default_str();
  gen_cmd->add_option("--rate", gen_args.rate, "sample rate in Hz")->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--count", gen_args.count, "number of clips")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*embed_cmd) return run_embed(embed_args);
    if (*extract_cmd) return run_extract(extract_args);
    if (*attack_cmd) return run_attack(attack_args);
    if (*eval_cmd) return run_evaluate(eval_args);
    if (*gen_cmd) return run_gen(gen_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gftmark: %s\n", e.what());
    return 1;
  }
  return 1;
}
