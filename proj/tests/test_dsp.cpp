#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gftmark/dsp.hpp"

using namespace gftmark;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(double freq, double rate, std::size_t n, double amp = 0.5) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
  return x;
}

double rms(const std::vector<double>& x, std::size_t skip = 0) {
  double s = 0.0;
  for (std::size_t i = skip; i + skip < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

// Magnitude of a bilinear-transformed Butterworth low-pass, closed form.
double butterworth_magnitude(double f, double fc, double fs, int order) {
  const double ratio = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2.0 * order));
}

}  // namespace

TEST(Butterworth, MatchesClosedFormMagnitude) {
  for (int order : {1, 2, 5, 6}) {
    const auto sos = dsp::butterworth_lowpass(order, 11025.0, 44100.0);
    for (double f : {0.0, 100.0, 5000.0, 11025.0, 15000.0, 20000.0}) {
      EXPECT_NEAR(std::abs(dsp::frequency_response(sos, f, 44100.0)),
                  butterworth_magnitude(f, 11025.0, 44100.0, order), 1e-9)
          << "order " << order << " f " << f;
    }
  }
}

TEST(Butterworth, RejectsBadCutoff) {
  EXPECT_THROW(dsp::butterworth_lowpass(6, 0.0, 44100.0), std::invalid_argument);
  EXPECT_THROW(dsp::butterworth_lowpass(6, 22050.0, 44100.0), std::invalid_argument);
  EXPECT_THROW(dsp::butterworth_lowpass(0, 1000.0, 44100.0), std::invalid_argument);
}

TEST(Filtfilt, ConstantPassesUnchanged) {
  const auto sos = dsp::butterworth_lowpass(6, 11025.0, 44100.0);
  const std::vector<double> x(5000, 0.3);
  const auto y = dsp::filtfilt(sos, x);
  ASSERT_EQ(y.size(), x.size());
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err += (y[i] - x[i]) * (y[i] - x[i]);
  EXPECT_LT(std::sqrt(err / x.size()), 1e-6);
}

TEST(Filtfilt, IsZeroPhase) {
  const auto sos = dsp::butterworth_lowpass(6, 2000.0, 44100.0);
  const auto x = sine(1500.0, 44100.0, 44100);
  const auto y = dsp::filtfilt(sos, x);
  const double gain = std::norm(dsp::frequency_response(sos, 1500.0, 44100.0));
  for (std::size_t i = 2000; i < 42000; i += 97) EXPECT_NEAR(y[i], gain * x[i], 1e-4);
}

TEST(Filtfilt, ShortInputs) {
  const auto sos = dsp::butterworth_lowpass(6, 1000.0, 44100.0);
  EXPECT_TRUE(dsp::filtfilt(sos, std::vector<double>{}).empty());
  EXPECT_EQ(dsp::filtfilt(sos, std::vector<double>{0.5}).size(), 1u);
  EXPECT_EQ(dsp::filtfilt(sos, std::vector<double>(7, 0.1)).size(), 7u);
}

TEST(Resampler, RatioAndLength) {
  const dsp::RationalResampler r(44100.0, 22050.0);
  EXPECT_EQ(r.up(), 1u);
  EXPECT_EQ(r.down(), 2u);
  EXPECT_EQ(r.output_length(1001), 501u);
  const dsp::RationalResampler r2(44100.0, 48000.0);
  EXPECT_EQ(r2.up(), 160u);
  EXPECT_EQ(r2.down(), 147u);
  EXPECT_THROW(dsp::RationalResampler(44100.5, 22050.0), std::invalid_argument);
  EXPECT_THROW(dsp::RationalResampler(44100.0, 0.0), std::invalid_argument);
}

TEST(Resampler, RoundTripPreservesPassband) {
  const std::size_t n = 44100;
  for (double f : {100.0, 1000.0, 5000.0, 9000.0, 10000.0}) {
    const auto x = sine(f, 44100.0, n);
    const auto down = dsp::resample(x, 44100.0, 22050.0);
    auto back = dsp::resample(down, 22050.0, 44100.0);
    back.resize(n);
    const double db = 20.0 * std::log10(rms(back, 2000) / rms(x, 2000));
    EXPECT_LT(std::abs(db), 0.5) << f << " Hz";
    if (f == 1000.0) {
      EXPECT_LT(std::abs(rms(back, 2000) / rms(x, 2000) - 1.0), 0.01);
    }
  }
}

TEST(Resampler, RemovesContentAboveNewNyquist) {
  const auto x = sine(15000.0, 44100.0, 44100);
  const auto down = dsp::resample(x, 44100.0, 22050.0);
  EXPECT_LT(rms(down, 1000) / rms(x, 1000), 0.01);
}

TEST(Resampler, ParallelMatchesSerial) {
  const auto x = sine(440.0, 44100.0, 30000);
  for (auto [in, out] : {std::pair{44100.0, 22050.0}, {22050.0, 44100.0}, {44100.0, 48000.0}}) {
    const dsp::RationalResampler r(in, out);
    EXPECT_EQ(r.process(x), r.process_serial(x));
  }
}

TEST(Stretch, SameLengthIsIdentity) {
  const auto x = sine(300.0, 44100.0, 1234);
  EXPECT_EQ(dsp::stretch_linear(x, x.size()), x);
}

TEST(Stretch, LinearRampStaysLinear) {
  std::vector<double> ramp(101);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
  const auto y = dsp::stretch_linear(ramp, 202);
  ASSERT_EQ(y.size(), 202u);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_NEAR(y[i], i * 101.0 / 202.0, 1e-12);
}
