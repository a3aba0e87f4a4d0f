#include "gftmark/attacks.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "gftmark/dsp.hpp"
#include "gftmark/io.hpp"
#include "gftmark/random.hpp"

namespace gftmark {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double mean_power(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) {
    acc += v * v;
  }
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

AudioClip with_samples(const AudioClip& like, std::vector<double> samples) {
  return AudioClip{std::move(samples), like.sample_rate};
}

double noise_scale(const AudioClip& clip, std::span<const double> noise, double snr_db) {
  const double signal = mean_power(clip.samples);
  if (!(signal > 0.0)) {
    throw std::invalid_argument("awgn: clip has zero power, SNR is undefined");
  }
  const double raw = mean_power(noise);
  return std::sqrt(signal / (raw * std::pow(10.0, snr_db / 10.0)));
}

bool is_executable(const std::string& exe) {
  if (exe.empty()) {
    return false;
  }
  if (exe.find('/') != std::string::npos) {
    return ::access(exe.c_str(), X_OK) == 0;
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) {
    return false;
  }
  std::string dirs(path);
  std::size_t start = 0;
  while (start <= dirs.size()) {
    const std::size_t end = std::min(dirs.find(':', start), dirs.size());
    const std::string dir = dirs.substr(start, end - start);
    const std::string candidate = (dir.empty() ? std::string(".") : dir) + "/" + exe;
    if (::access(candidate.c_str(), X_OK) == 0) {
      return true;
    }
    start = end + 1;
  }
  return false;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string expand(std::string tmpl, const std::string& exe, const std::string& in,
                   const std::string& out, int kbps) {
  const std::pair<std::string, std::string> subs[] = {
      {"{exe}", shell_quote(exe)},
      {"{in}", shell_quote(in)},
      {"{out}", shell_quote(out)},
      {"{bitrate}", std::to_string(kbps)},
  };
  for (const auto& [key, value] : subs) {
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
      tmpl.replace(pos, key.size(), value);
    }
  }
  return tmpl;
}

void run_command(const std::string& cmd, const char* stage) {
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw std::runtime_error(std::string("mp3 ") + stage + " failed (status " + std::to_string(rc) +
                             "): " + cmd);
  }
}

}  // namespace

AttackSpec AttackSpec::awgn_db(double snr_db) {
  AttackSpec s;
  s.kind = AttackKind::awgn;
  s.snr_db = snr_db;
  return s;
}

AttackSpec AttackSpec::lowpass_hz(double cutoff_hz) {
  AttackSpec s;
  s.kind = AttackKind::lowpass;
  s.cutoff_hz = cutoff_hz;
  return s;
}

AttackSpec AttackSpec::resample_via(double rate_hz) {
  AttackSpec s;
  s.kind = AttackKind::resample;
  s.intermediate_rate_hz = rate_hz;
  return s;
}

AttackSpec AttackSpec::requantize_bits(int bits) {
  AttackSpec s;
  s.kind = AttackKind::requantize;
  s.bit_depth = bits;
  return s;
}

AttackSpec AttackSpec::amplitude_gain(double gain) {
  AttackSpec s;
  s.kind = AttackKind::amplitude;
  s.gain = gain;
  return s;
}

AttackSpec AttackSpec::tsm_percent(double percent) {
  AttackSpec s;
  s.kind = AttackKind::tsm;
  s.stretch_percent = percent;
  return s;
}

AttackSpec AttackSpec::crop_of(std::size_t frames, CropEnd end) {
  AttackSpec s;
  s.kind = AttackKind::crop;
  s.crop_frames = frames;
  s.end = end;
  return s;
}

AttackSpec AttackSpec::mp3_kbps(int kbps) {
  AttackSpec s;
  s.kind = AttackKind::mp3;
  s.bitrate_kbps = kbps;
  return s;
}

std::string AttackSpec::label() const {
  switch (kind) {
    case AttackKind::none:
      return "none";
    case AttackKind::awgn:
      return "awgn-" + num(snr_db) + "dB";
    case AttackKind::lowpass:
      return "lowpass-" + num(cutoff_hz) + "Hz";
    case AttackKind::resample:
      return "resample-" + num(intermediate_rate_hz) + "Hz";
    case AttackKind::requantize:
      return "requantize-" + std::to_string(bit_depth) + "bit";
    case AttackKind::amplitude:
      return "amplitude-x" + num(gain);
    case AttackKind::tsm:
      return std::string("tsm") + (stretch_percent >= 0 ? "+" : "") + num(stretch_percent) + "%";
    case AttackKind::crop:
      return "crop-" + std::to_string(crop_frames) + (end == CropEnd::front ? "-front" : "-back");
    case AttackKind::mp3:
      return "mp3-" + std::to_string(bitrate_kbps) + "kbps";
  }
  return "unknown";
}

std::string AttackSpec::parameters() const {
  switch (kind) {
    case AttackKind::none:
      return "";
    case AttackKind::awgn:
      return "snr_db=" + num(snr_db);
    case AttackKind::lowpass:
      return "cutoff_hz=" + num(cutoff_hz);
    case AttackKind::resample:
      return "intermediate_rate_hz=" + num(intermediate_rate_hz);
    case AttackKind::requantize:
      return "bit_depth=" + std::to_string(bit_depth);
    case AttackKind::amplitude:
      return "gain=" + num(gain);
    case AttackKind::tsm:
      return "stretch_percent=" + num(stretch_percent);
    case AttackKind::crop:
      return "crop_frames=" + std::to_string(crop_frames) +
             (end == CropEnd::front ? " end=front" : " end=back");
    case AttackKind::mp3:
      return "bitrate_kbps=" + std::to_string(bitrate_kbps);
  }
  return "";
}

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::awgn: return "awgn";
    case AttackKind::lowpass: return "lowpass";
    case AttackKind::resample: return "resample";
    case AttackKind::requantize: return "requantize";
    case AttackKind::amplitude: return "amplitude";
    case AttackKind::tsm: return "tsm";
    case AttackKind::crop: return "crop";
    case AttackKind::mp3: return "mp3-external";
  }
  return "unknown";
}

AttackKind parse_attack_kind(const std::string& name) {
  for (AttackKind k : {AttackKind::none, AttackKind::awgn, AttackKind::lowpass, AttackKind::resample,
                       AttackKind::requantize, AttackKind::amplitude, AttackKind::tsm,
                       AttackKind::crop, AttackKind::mp3}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  if (name == "mp3") {
    return AttackKind::mp3;
  }
  throw std::invalid_argument("unknown attack type '" + name + "'");
}

CropEnd parse_crop_end(const std::string& name) {
  if (name == "front") {
    return CropEnd::front;
  }
  if (name == "back") {
    return CropEnd::back;
  }
  throw std::invalid_argument("crop end must be 'front' or 'back', got '" + name + "'");
}

AudioClip awgn(const AudioClip& clip, double snr_db, std::uint64_t seed) {
  const auto n = static_cast<std::ptrdiff_t>(clip.size());
  std::vector<double> noise(clip.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    noise[i] = gaussian_at(seed, static_cast<std::uint64_t>(i));
  }
  const double scale = noise_scale(clip, noise, snr_db);
  std::vector<double> out(clip.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = clip.samples[i] + scale * noise[i];
  }
  return with_samples(clip, std::move(out));
}

namespace reference {

AudioClip awgn(const AudioClip& clip, double snr_db, std::uint64_t seed) {
  std::vector<double> noise(clip.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] = gaussian_at(seed, i);
  }
  const double scale = noise_scale(clip, noise, snr_db);
  std::vector<double> out(clip.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = clip.samples[i] + scale * noise[i];
  }
  return with_samples(clip, std::move(out));
}

}  // namespace reference

AudioClip lowpass(const AudioClip& clip, double cutoff_hz) {
  const auto sections = dsp::butterworth_lowpass(6, cutoff_hz, clip.sample_rate);
  return with_samples(clip, dsp::filtfilt(sections, clip.samples));
}

AudioClip resample_chain(const AudioClip& clip, double intermediate_rate_hz) {
  if (!(intermediate_rate_hz > 0.0)) {
    throw std::invalid_argument("resample: intermediate rate must be positive");
  }
  if (intermediate_rate_hz == clip.sample_rate) {
    return clip;
  }
  const auto down = dsp::resample(clip.samples, clip.sample_rate, intermediate_rate_hz);
  auto back = dsp::resample(down, intermediate_rate_hz, clip.sample_rate);
  return fit_length(with_samples(clip, std::move(back)), clip.size());
}

AudioClip requantize(const AudioClip& clip, int bit_depth) {
  if (bit_depth < 2 || bit_depth > 16) {
    throw std::invalid_argument("requantize: bit depth " + std::to_string(bit_depth) +
                                " outside [2, 16]");
  }
  const double levels = std::ldexp(1.0, bit_depth - 1);
  std::vector<double> out(clip.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = quantize_sample(clip.samples[i], bit_depth) / levels;
  }
  return with_samples(clip, std::move(out));
}

AudioClip amplitude(const AudioClip& clip, double gain) {
  if (!(gain > 0.0)) {
    throw std::invalid_argument("amplitude: gain must be positive");
  }
  std::vector<double> out(clip.samples);
  for (double& v : out) {
    v *= gain;
  }
  return with_samples(clip, std::move(out));
}

AudioClip tsm(const AudioClip& clip, double stretch_percent) {
  if (!(stretch_percent >= -50.0 && stretch_percent <= 100.0)) {
    throw std::invalid_argument("tsm: stretch " + num(stretch_percent) + "% outside [-50, 100]");
  }
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(clip.size()) * (1.0 + stretch_percent / 100.0)));
  return with_samples(clip, dsp::stretch_linear(clip.samples, out_len));
}

AudioClip crop(const AudioClip& clip, std::size_t n_frames, CropEnd end, std::size_t frame_len) {
  const std::size_t removed = n_frames * frame_len;
  if (removed >= clip.size()) {
    throw std::invalid_argument("crop: removing " + std::to_string(removed) + " of " +
                                std::to_string(clip.size()) + " samples leaves nothing");
  }
  const auto first = clip.samples.begin();
  const auto last = clip.samples.end();
  const auto cut = static_cast<std::ptrdiff_t>(removed);
  return end == CropEnd::front ? with_samples(clip, std::vector<double>(first + cut, last))
                               : with_samples(clip, std::vector<double>(first, last - cut));
}

AudioClip fit_length(AudioClip clip, std::size_t len) {
  clip.samples.resize(len, 0.0);
  return clip;
}

AudioClip mp3_external(const AudioClip& clip, int bitrate_kbps, const Mp3Codec& codec) {
  const std::string decoder = codec.decoder.empty() ? codec.encoder : codec.decoder;
  if (!is_executable(codec.encoder)) {
    throw AttackSkipped("mp3: encoder '" + codec.encoder + "' not found");
  }
  if (!is_executable(decoder)) {
    throw AttackSkipped("mp3: decoder '" + decoder + "' not found");
  }

  static std::atomic<unsigned> counter{0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("gftmark-mp3-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  const fs::path in = dir / "in.wav";
  const fs::path mp3 = dir / "coded.mp3";
  const fs::path out = dir / "decoded.wav";
  write_wav(clip, in);
  run_command(expand(codec.encode_template, codec.encoder, in, mp3, bitrate_kbps), "encode");
  run_command(expand(codec.decode_template, decoder, mp3, out, bitrate_kbps), "decode");
  AudioClip decoded = read_wav(out);
  decoded.sample_rate = clip.sample_rate;
  return fit_length(std::move(decoded), clip.size());
}

AudioClip apply_attack(const AttackSpec& spec, const AudioClip& clip, std::size_t frame_len,
                       const Mp3Codec* codec) {
  switch (spec.kind) {
    case AttackKind::none:
      return clip;
    case AttackKind::awgn:
      return awgn(clip, spec.snr_db, spec.seed);
    case AttackKind::lowpass:
      return lowpass(clip, spec.cutoff_hz);
    case AttackKind::resample:
      return resample_chain(clip, spec.intermediate_rate_hz);
    case AttackKind::requantize:
      return requantize(clip, spec.bit_depth);
    case AttackKind::amplitude:
      return amplitude(clip, spec.gain);
    case AttackKind::tsm:
      return tsm(clip, spec.stretch_percent);
    case AttackKind::crop:
      return crop(clip, spec.crop_frames, spec.end, frame_len);
    case AttackKind::mp3:
      if (codec == nullptr) {
        throw AttackSkipped("mp3: no external encoder configured");
      }
      return mp3_external(clip, spec.bitrate_kbps, *codec);
  }
  throw std::invalid_argument("unknown attack kind");
}

}  // namespace gftmark
