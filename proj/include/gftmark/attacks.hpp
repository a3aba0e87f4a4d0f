#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "gftmark/watermark.hpp"

namespace gftmark {

enum class AttackKind { none, awgn, lowpass, resample, requantize, amplitude, tsm, crop, mp3 };
enum class CropEnd { front, back };

/// Declarative attack description. Only the fields of the selected kind are
/// read.
struct AttackSpec {
  AttackKind kind = AttackKind::none;
  double snr_db = 20.0;
  double cutoff_hz = 11025.0;
  double intermediate_rate_hz = 22050.0;
  int bit_depth = 8;
  double gain = 1.0;
  double stretch_percent = 0.0;
  std::size_t crop_frames = 0;
  CropEnd end = CropEnd::front;
  int bitrate_kbps = 128;
  std::uint64_t seed = 0;

  static AttackSpec no_attack() { return {}; }
  static AttackSpec awgn_db(double snr_db);
  static AttackSpec lowpass_hz(double cutoff_hz);
  static AttackSpec resample_via(double rate_hz);
  static AttackSpec requantize_bits(int bits);
  static AttackSpec amplitude_gain(double gain);
  static AttackSpec tsm_percent(double percent);
  static AttackSpec crop_of(std::size_t frames, CropEnd end);
  static AttackSpec mp3_kbps(int kbps);

  /// Short unique label, e.g. "awgn-20dB", "crop-5-front".
  std::string label() const;
  /// Parameter summary, e.g. "snr_db=20".
  std::string parameters() const;
};

std::string to_string(AttackKind kind);
/// Throws std::invalid_argument for unknown names.
AttackKind parse_attack_kind(const std::string& name);
CropEnd parse_crop_end(const std::string& name);

/// External MP3 round trip. Templates expand {exe}, {in}, {out}, {bitrate}.
struct Mp3Codec {
  std::string encoder;
  std::string decoder;  // defaults to the encoder when empty
  std::string encode_template = "{exe} --quiet -b {bitrate} {in} {out}";
  std::string decode_template = "{exe} --quiet --decode {in} {out}";
};

/// The attack could not run (e.g. no encoder); reported, never passed.
class AttackSkipped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AudioClip awgn(const AudioClip& clip, double snr_db, std::uint64_t seed);
AudioClip lowpass(const AudioClip& clip, double cutoff_hz);
AudioClip resample_chain(const AudioClip& clip, double intermediate_rate_hz);
AudioClip requantize(const AudioClip& clip, int bit_depth);
AudioClip amplitude(const AudioClip& clip, double gain);
AudioClip tsm(const AudioClip& clip, double stretch_percent);
AudioClip crop(const AudioClip& clip, std::size_t n_frames, CropEnd end, std::size_t frame_len);
AudioClip mp3_external(const AudioClip& clip, int bitrate_kbps, const Mp3Codec& codec);

/// Truncate or zero-pad to exactly len samples.
AudioClip fit_length(AudioClip clip, std::size_t len);

/// frame_len is the N of the original embedding framing (crop only).
/// codec may be null, which skips MP3.
AudioClip apply_attack(const AttackSpec& spec, const AudioClip& clip, std::size_t frame_len,
                       const Mp3Codec* codec = nullptr);

namespace reference {

AudioClip awgn(const AudioClip& clip, double snr_db, std::uint64_t seed);

}  // namespace reference

}  // namespace gftmark
