#include "gftmark/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gftmark::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

Biquad normalize_dc(Biquad s) {
  const double g = (1.0 + s.a1 + s.a2) / (s.b0 + s.b1 + s.b2);
  s.b0 *= g;
  s.b1 *= g;
  s.b2 *= g;
  return s;
}

void run_section(const Biquad& s, std::vector<double>& x, double x0) {
  // Steady state of the transposed direct form II for constant input x0.
  const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  double z2 = (s.b2 - s.a2 * g) * x0;
  double z1 = (s.b1 - s.a1 * g) * x0 + z2;
  for (double& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

void filter_in_place(std::span<const Biquad> sections, std::vector<double>& x) {
  if (x.empty()) {
    return;
  }
  for (const Biquad& s : sections) {
    run_section(s, x, x.front());
  }
}

double kaiser(double u, double beta) {
  if (std::abs(u) > 1.0) {
    return 0.0;
  }
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - u * u)) / std::cyl_bessel_i(0.0, beta);
}

double sinc(double x) {
  if (x == 0.0) {
    return 1.0;
  }
  return std::sin(kPi * x) / (kPi * x);
}

std::size_t integral_rate(double rate) {
  const double r = std::round(rate);
  if (!(rate > 0.0) || std::abs(rate - r) > 1e-9 * rate) {
    throw std::invalid_argument("resampler needs positive integer sample rates, got " +
                                std::to_string(rate));
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 1) {
    throw std::invalid_argument("Butterworth order must be >= 1");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("low-pass cutoff " + std::to_string(cutoff_hz) +
                                " Hz outside (0, fs/2)");
  }
  const double fs2 = 2.0 * sample_rate;
  const double warped = fs2 * std::tan(kPi * cutoff_hz / sample_rate);
  std::vector<Biquad> sections;

  for (int k = 0; k < order / 2; ++k) {
    const double angle = kPi * (2.0 * k + order + 1.0) / (2.0 * order);
    const std::complex<double> pole = warped * std::polar(1.0, angle);
    const std::complex<double> zp = (fs2 + pole) / (fs2 - pole);
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 2.0;
    s.b2 = 1.0;
    s.a1 = -2.0 * zp.real();
    s.a2 = std::norm(zp);
    sections.push_back(normalize_dc(s));
  }
  if (order % 2 == 1) {
    const double zp = (fs2 - warped) / (fs2 + warped);
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 1.0;
    s.a1 = -zp;
    sections.push_back(normalize_dc(s));
  }
  return sections;
}

std::complex<double> frequency_response(std::span<const Biquad> sections, double freq_hz,
                                        double sample_rate) {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const Biquad& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

std::vector<double> sosfilt(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  filter_in_place(sections, y);
  return y;
}

std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) {
    return {};
  }
  const std::size_t pad = std::min<std::size_t>(3 * (2 * sections.size() + 1), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) {
    ext.push_back(2.0 * x[0] - x[i]);
  }
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) {
    ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
  }

  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());
  filter_in_place(sections, ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

RationalResampler::RationalResampler(double in_rate, double out_rate, ResamplerOptions opts) {
  const std::size_t in = integral_rate(in_rate);
  const std::size_t out = integral_rate(out_rate);
  const std::size_t g = std::gcd(in, out);
  up_ = out / g;
  down_ = in / g;
  if (up_ > 4096) {
    throw std::invalid_argument("resampling ratio " + std::to_string(out) + "/" +
                                std::to_string(in) + " needs too many polyphase branches");
  }

  // Cutoff in cycles per input sample is cutoff / 2.
  const double cutoff = opts.rolloff * std::min(1.0, static_cast<double>(up_) / down_);
  const double half_width = opts.zero_crossings / cutoff;
  half_taps_ = static_cast<std::ptrdiff_t>(std::ceil(half_width));
  const auto width = static_cast<std::size_t>(2 * half_taps_);
  taps_.assign(up_ * width, 0.0);

  for (std::size_t p = 0; p < up_; ++p) {
    const double frac = static_cast<double>(p) / static_cast<double>(up_);
    double* row = &taps_[p * width];
    double sum = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      // Tap i weighs input q - half_taps + 1 + i for an output at time q + frac.
      const double tau = static_cast<double>(half_taps_ - 1 - static_cast<std::ptrdiff_t>(i)) + frac;
      row[i] = cutoff * sinc(cutoff * tau) * kaiser(tau / half_width, opts.kaiser_beta);
      sum += row[i];
    }
    for (std::size_t i = 0; i < width; ++i) {
      row[i] /= sum;
    }
  }
}

std::size_t RationalResampler::output_length(std::size_t input_length) const {
  return (input_length * up_ + down_ - 1) / down_;
}

double RationalResampler::output_sample(std::span<const double> x, std::size_t n) const {
  const std::size_t pos = n * down_;
  const auto q = static_cast<std::ptrdiff_t>(pos / up_);
  const std::size_t phase = pos % up_;
  const auto width = 2 * half_taps_;
  const double* row = &taps_[phase * static_cast<std::size_t>(width)];
  const std::ptrdiff_t first = q - half_taps_ + 1;
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -first);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(width, static_cast<std::ptrdiff_t>(x.size()) - first);
  double acc = 0.0;
  for (std::ptrdiff_t i = lo; i < hi; ++i) {
    acc += row[i] * x[static_cast<std::size_t>(first + i)];
  }
  return acc;
}

std::vector<double> RationalResampler::process(std::span<const double> x) const {
  const auto len = static_cast<std::ptrdiff_t>(output_length(x.size()));
  std::vector<double> y(static_cast<std::size_t>(len));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < len; ++n) {
    y[n] = output_sample(x, static_cast<std::size_t>(n));
  }
  return y;
}

std::vector<double> RationalResampler::process_serial(std::span<const double> x) const {
  std::vector<double> y(output_length(x.size()));
  for (std::size_t n = 0; n < y.size(); ++n) {
    y[n] = output_sample(x, n);
  }
  return y;
}

std::vector<double> resample(std::span<const double> x, double in_rate, double out_rate,
                             ResamplerOptions opts) {
  return RationalResampler(in_rate, out_rate, opts).process(x);
}

std::vector<double> stretch_linear(std::span<const double> x, std::size_t out_len) {
  std::vector<double> y(out_len, 0.0);
  if (x.empty() || out_len == 0) {
    return y;
  }
  const std::size_t last = x.size() - 1;
  const double step = static_cast<double>(x.size()) / static_cast<double>(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) * step;
    const auto i = std::min(static_cast<std::size_t>(t), last);
    const double frac = t - static_cast<double>(i);
    const double next = x[std::min(i + 1, last)];
    y[n] = x[i] + frac * (next - x[i]);
  }
  return y;
}

}  // namespace gftmark::dsp
