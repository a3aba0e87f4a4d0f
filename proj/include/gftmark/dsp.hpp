#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gftmark::dsp {

/// Second-order section, a0 normalized to 1, transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth low-pass by bilinear transform with pre-warping.
/// Each section has unity gain at DC.
std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate);

std::complex<double> frequency_response(std::span<const Biquad> sections, double freq_hz,
                                        double sample_rate);

/// Single causal pass. Section states start at the steady state of a constant
/// input equal to x[0], so a constant signal passes through unchanged.
std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x);

/// Forward-backward (zero-phase) filtering with odd-reflection padding.
std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x);

struct ResamplerOptions {
  double rolloff = 0.95;  // passband edge relative to the lower Nyquist
  int zero_crossings = 64;
  double kaiser_beta = 8.6;
};

/// Windowed-sinc polyphase resampler between two integer rates with a
/// rational ratio L/M.
class RationalResampler {
 public:
  /// Throws std::invalid_argument for non-positive or non-integer rates, or a
  /// reduced ratio with more than 4096 phases.
  RationalResampler(double in_rate, double out_rate, ResamplerOptions opts = {});

  std::size_t up() const { return up_; }
  std::size_t down() const { return down_; }
  std::size_t output_length(std::size_t input_length) const;

  std::vector<double> process(std::span<const double> x) const;
  std::vector<double> process_serial(std::span<const double> x) const;

 private:
  double output_sample(std::span<const double> x, std::size_t n) const;

  std::size_t up_ = 1;
  std::size_t down_ = 1;
  std::ptrdiff_t half_taps_ = 0;
  std::vector<double> taps_;  // up_ phases x (2 * half_taps_)
};

std::vector<double> resample(std::span<const double> x, double in_rate, double out_rate,
                             ResamplerOptions opts = {});

/// Linear-interpolation time stretch to exactly out_len samples.
std::vector<double> stretch_linear(std::span<const double> x, std::size_t out_len);

}  // namespace gftmark::dsp
