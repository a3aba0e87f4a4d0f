// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>
#include <unistd.h>

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gftmark/attacks.hpp"
#include "gftmark/evaluate.hpp"
#include "gftmark/graph.hpp"
#include "gftmark/io.hpp"
#include "gftmark/kmeans.hpp"
#include "gftmark/metrics.hpp"
#include "gftmark/random.hpp"
#include "gftmark/synth.hpp"
#include "gftmark/watermark.hpp"

using namespace gftmark;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr std::size_t kClips = 10;
constexpr std::uint64_t kSeed = 1;

// Same clips as `gftmark gen-audio --count 10 --seed 1`, read back through
// the 16-bit WAV mapping.
std::vector<NamedClip> make_clips() {
  std::vector<NamedClip> clips(kClips);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < kClips; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "clip_%02zu.wav", i);
    const AudioClip raw = synthesize_music({64.0, 44100.0, derive_seed(kSeed, name)});
    clips[i] = {fs::path(name).stem().string(), parse_wav(serialize_wav(raw))};
  }
  return clips;
}

BinaryImage make_watermark() {
  BinaryImage img(64, 64);
  SplitMix64 rng(0x5eed);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) img.set(r, c, rng.next() & 1);
  return img;
}

std::map<std::string, double> mean_ber(const std::vector<EvalResult>& results, Outcome& o) {
  std::map<std::string, double> sum;
  std::map<std::string, int> count;
  for (const auto& r : results) {
    if (r.status == CellStatus::error) o.require(false, r.clip + "/" + r.attack + " errored: " + r.message);
    if (r.status != CellStatus::ok) continue;
    sum[r.attack] += r.ber;
    ++count[r.attack];
  }
  for (auto& [k, v] : sum) v /= count[k];
  return sum;
}

Outcome criterion1(const std::vector<NamedClip>& clips, const BitSequence& w, const SchemeConfig& cfg) {
  Outcome o;
  const auto t0 = Clock::now();
  for (const auto& c : clips) {
    const BitSequence key = embed(c.clip, w, cfg);
    const BitSequence r = extract_bits(c.clip, key, cfg);
    o.require(ber(w, r) == 0.0 && nc(w, r) == 1.0, c.label + " not lossless");
  }
  const double t = seconds_since(t0);
  o.require(t < 10.0, "runtime " + fmt("%.2f s", t));
  o.detail = (o.pass ? "" : o.detail + "; ") + "10 clips lossless in " + fmt("%.2f s", t);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  double worst_off = 0.0;
  double worst_diag = 0.0;
  double worst_parseval = 0.0;
  double worst_fast = 0.0;
  for (std::size_t n : {7u, 8u, 12u, 64u, 689u}) {
    for (std::size_t k : {1u, 2u, 3u}) {
      const ShiftOperator op(n, k);
      const FourierBasis basis = fourier_basis(op);
      const Eigen::MatrixXcd d = basis.forward * op.dense().cast<Complex>() * basis.inverse;
      for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
          if (i == j) {
            worst_diag = std::max(worst_diag, std::abs(d(i, j) - basis.eigenvalues[i]));
          } else {
            worst_off = std::max(worst_off, std::abs(d(i, j)));
          }
        }
      }
      const GraphFourierTransform fast(op);
      std::vector<double> x(n);
      for (int trial = 0; trial < 100; ++trial) {
        for (auto& v : x) v = gauss(rng);
        const GraphSpectrum s = fast.forward(x);
        const std::vector<double> shifted = op.apply(x);
        double ns = 0.0;
        double nx = 0.0;
        for (const auto& c : s.coefficients) ns += std::norm(c);
        for (double v : shifted) nx += v * v;
        worst_parseval = std::max(worst_parseval, std::abs(std::sqrt(ns) - std::sqrt(nx)));
        const GraphSpectrum dense = gft_dense(basis, op, x);
        for (std::size_t j = 0; j < n; ++j) {
          worst_fast = std::max(worst_fast, std::abs(s.coefficients[j] - dense.coefficients[j]));
        }
      }
    }
  }
  const double t = seconds_since(t0);
  o.require(worst_off <= 1e-9, "off-diagonal " + fmt("%.3g", worst_off));
  o.require(worst_diag <= 1e-9, "diagonal vs eigenvalues " + fmt("%.3g", worst_diag));
  o.require(worst_parseval <= 1e-9, "Parseval " + fmt("%.3g", worst_parseval));
  o.require(worst_fast <= 1e-8, "fast vs dense " + fmt("%.3g", worst_fast));
  o.require(t < 30.0, "runtime " + fmt("%.2f s", t));
  if (o.pass) {
    o.detail = "max off-diag " + fmt("%.2g", worst_off) + ", Parseval " + fmt("%.2g", worst_parseval) +
               ", fast/dense " + fmt("%.2g", worst_fast) + ", " + fmt("%.2f s", t);
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 64; ++n) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(5, n); ++k) {
      const ShiftOperator op(n, k);
      const Eigen::MatrixXd dense = op.dense();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          bool member = false;
          for (std::size_t t = 0; t < k; ++t) member = member || ((i + t) % n == j);
          const double expected = member ? 1.0 : 0.0;
          if (dense(i, j) != expected || static_cast<double>(op.entry(i, j)) != expected) {
            o.require(false, "mismatch N=" + std::to_string(n) + " k=" + std::to_string(k));
            return o;
          }
        }
      }
      ++checked;
    }
  }
  o.detail = std::to_string(checked) + " (N, k) pairs match enumeration";
  return o;
}

double best_contiguous_split(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto sse = [&](std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m += v[i];
    m /= static_cast<double>(hi - lo);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += (v[i] - m) * (v[i] - m);
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t cut = 1; cut < v.size(); ++cut) best = std::min(best, sse(0, cut) + sse(cut, v.size()));
  return best;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> inputs;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 2 + rng() % 15;
    std::vector<double> v(m);
    switch (t % 3) {
      case 0:
        for (auto& x : v) x = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
        break;
      case 1:
        for (auto& x : v) x = std::exponential_distribution<double>(0.5)(rng);
        break;
      default:
        for (auto& x : v) x = static_cast<double>(rng() % 4);
        break;
    }
    inputs.push_back(std::move(v));
  }
  int mismatches = 0;
  for (const auto& v : inputs) {
    const TwoMeansResult r = two_means(v);
    const bool distinct = *std::min_element(v.begin(), v.end()) != *std::max_element(v.begin(), v.end());
    if (!distinct) continue;
    const double opt = best_contiguous_split(v);
    if (std::abs(r.cost - opt) > 1e-9 * std::max(1.0, opt)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " cost mismatches");

  std::vector<BitSequence> baseline(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) baseline[i] = binarize_features(inputs[i]);
  int unstable = 0;
  for (int threads : {1, 2, 4, 8}) {
    std::vector<BitSequence> codes(inputs.size());
#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::size_t i = 0; i < inputs.size(); ++i) codes[i] = binarize_features(inputs[i]);
    for (std::size_t i = 0; i < inputs.size(); ++i) unstable += codes[i] == baseline[i] ? 0 : 1;
  }
  o.require(unstable == 0, std::to_string(unstable) + " codes differ across thread counts");
  if (o.pass) o.detail = "1000 vectors optimal; codes stable over 1/2/4/8 threads";
  return o;
}

Outcome criterion5(const std::vector<NamedClip>& clips, const BitSequence& w, const SchemeConfig& cfg) {
  Outcome o;
  double wav_sum = 0.0;
  int wav_n = 0;
  for (const auto& c : clips) {
    const BitSequence key = embed(c.clip, w, cfg);
    for (double g : {1.5, 2.0}) {
      const AudioClip scaled = amplitude(c.clip, g);
      const double b = ber(w, extract_bits(scaled, key, cfg));
      o.require(b == 0.0, c.label + " x" + fmt("%.1f", g) + " float BER " + fmt("%.4f", b));
      wav_sum += ber(w, extract_bits(parse_wav(serialize_wav(scaled)), key, cfg));
      ++wav_n;
    }
  }
  const double wav_mean = wav_sum / wav_n;
  o.require(wav_mean <= 0.01, "16-bit WAV mean BER " + fmt("%.4f", wav_mean));
  if (o.pass) o.detail = "float BER 0; 16-bit WAV mean BER " + fmt("%.4f", wav_mean);
  return o;
}

Outcome criterion6(const std::vector<NamedClip>& clips, const BitSequence& w, const SchemeConfig& scheme) {
  Outcome o;
  EvaluationConfig cfg;
  cfg.scheme = scheme;
  cfg.seed = kSeed;
  cfg.jobs = omp_get_max_threads();
  cfg.attacks = {AttackSpec::awgn_db(20.0), AttackSpec::awgn_db(10.0), AttackSpec::resample_via(22050.0),
                 AttackSpec::requantize_bits(8), AttackSpec::lowpass_hz(11025.0)};
  const auto t0 = Clock::now();
  const auto out = evaluate(clips, w, cfg);
  const double t = seconds_since(t0);
  const auto means = mean_ber(out.results, o);
  const std::vector<std::pair<std::string, double>> limits = {
      {"awgn-20dB", 0.05}, {"awgn-10dB", 0.10}, {"resample-22050Hz", 0.02},
      {"requantize-8bit", 0.08}, {"lowpass-11025Hz", 0.05}};
  std::string summary;
  for (const auto& [label, limit] : limits) {
    const auto it = means.find(label);
    const double m = it == means.end() ? 1.0 : it->second;
    o.require(m <= limit, label + " mean BER " + fmt("%.4f", m) + " > " + fmt("%.2f", limit));
    summary += label + "=" + fmt("%.4f", m) + " ";
  }
  o.require(t < 300.0, "runtime " + fmt("%.1f s", t));
  if (o.pass) o.detail = summary + fmt("(%.1f s)", t);
  return o;
}

Outcome criterion7(const std::vector<NamedClip>& clips, const BitSequence& w, const SchemeConfig& scheme) {
  Outcome o;
  EvaluationConfig cfg;
  cfg.scheme = scheme;
  cfg.seed = kSeed;
  cfg.jobs = omp_get_max_threads();
  cfg.attacks = {AttackSpec::tsm_percent(1.0), AttackSpec::tsm_percent(-1.0)};
  for (CropEnd end : {CropEnd::front, CropEnd::back})
    for (std::size_t f : {5u, 10u, 20u}) cfg.attacks.push_back(AttackSpec::crop_of(f, end));
  const auto out = evaluate(clips, w, cfg);
  const auto means = mean_ber(out.results, o);
  auto mean_of = [&](const std::string& label) {
    const auto it = means.find(label);
    return it == means.end() ? 1.0 : it->second;
  };
  std::string summary;
  for (const auto& [label, limit] : std::vector<std::pair<std::string, double>>{
           {"tsm+1%", 0.30}, {"tsm-1%", 0.30}, {"crop-5-front", 0.30}, {"crop-20-back", 0.40}}) {
    const double m = mean_of(label);
    o.require(m <= limit, label + " mean BER " + fmt("%.4f", m) + " > " + fmt("%.2f", limit));
    summary += label + "=" + fmt("%.4f", m) + " ";
  }
  for (const char* end : {"front", "back"}) {
    const std::string base = std::string("-") + end;
    const double c5 = mean_of("crop-5" + base);
    const double c10 = mean_of("crop-10" + base);
    const double c20 = mean_of("crop-20" + base);
    const std::string trend = std::string(end) + " 5/10/20=" + fmt("%.4f", c5) + "/" + fmt("%.4f", c10) +
                              "/" + fmt("%.4f", c20);
    o.require(c5 <= c10 && c10 <= c20, "crop " + trend + " not nondecreasing");
    summary += trend + " ";
  }
  if (o.pass) o.detail = summary;
  return o;
}

double realized_snr(const AudioClip& clean, const AudioClip& noisy) {
  double ps = 0.0;
  double pn = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ps += clean.samples[i] * clean.samples[i];
    pn += std::pow(noisy.samples[i] - clean.samples[i], 2);
  }
  return 10.0 * std::log10(ps / pn);
}

Outcome criterion8(const std::vector<NamedClip>& clips, const SchemeConfig& cfg) {
  Outcome o;
  double worst_snr = 0.0;
  for (const auto& c : clips) {
    for (double snr : {10.0, 20.0}) {
      const auto noisy = awgn(c.clip, snr, cell_seed(kSeed, c.label, "awgn"));
      worst_snr = std::max(worst_snr, std::abs(realized_snr(c.clip, noisy) - snr));
    }
  }
  o.require(worst_snr <= 0.5, "SNR error " + fmt("%.3f dB", worst_snr));

  const AudioClip& host = clips.front().clip;
  for (double p : {1.0, -1.0, 10.0, -10.0}) {
    const auto expected = static_cast<std::size_t>(std::llround(host.size() * (1.0 + p / 100.0)));
    o.require(tsm(host, p).size() == expected, "TSM length at " + fmt("%+.0f%%", p));
  }
  for (const auto& c : clips) {
    o.require(requantize(c.clip, 16).samples == c.clip.samples, c.label + " requantize(16) changed samples");
  }

  const std::size_t frame_len = frame_length(host.size(), cfg.watermark_length);
  int nondeterministic = 0;
  for (AttackSpec spec : standard_suite()) {
    if (spec.kind == AttackKind::mp3) continue;
    spec.seed = 99;
    const Bytes a = serialize_wav(apply_attack(spec, host, frame_len));
    const Bytes b = serialize_wav(apply_attack(spec, host, frame_len));
    nondeterministic += a == b ? 0 : 1;
  }
  o.require(nondeterministic == 0, std::to_string(nondeterministic) + " attacks not byte-identical");
  if (o.pass) o.detail = "max SNR error " + fmt("%.2g dB", worst_snr) + "; lengths exact; deterministic";
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  int failures = 0;
  for (int t = 0; t < 200; ++t) {
    AudioClip clip{std::vector<double>(rng() % 3000), static_cast<double>(8000 + rng() % 40000)};
    for (auto& s : clip.samples) s = (static_cast<int>(rng() % 65536) - 32768) / 32768.0;
    const AudioClip back = parse_wav(serialize_wav(clip));
    failures += back.samples == clip.samples && back.sample_rate == clip.sample_rate ? 0 : 1;

    BinaryImage img(1 + rng() % 70, 1 + rng() % 70);
    for (std::size_t r = 0; r < img.height(); ++r)
      for (std::size_t c = 0; c < img.width(); ++c) img.set(r, c, rng() & 1);
    failures += parse_pbm(serialize_pbm(img, PbmFormat::ascii)) == img ? 0 : 1;
    failures += parse_pbm(serialize_pbm(img, PbmFormat::binary)) == img ? 0 : 1;

    const std::size_t m = t < 16 ? static_cast<std::size_t>(t + 1) : 1 + rng() % 5000;
    BitSequence key(m);
    for (std::size_t i = 0; i < m; ++i) key.set(i, rng() & 1);
    const std::size_t k = 1 + rng() % 255;
    const WatermarkKey parsed = parse_key(serialize_key(key, k));
    failures += parsed.bits == key && parsed.k == k ? 0 : 1;
  }
  o.require(failures == 0, std::to_string(failures) + " round-trip failures");
  if (o.pass) o.detail = "200 randomized WAV, P1, P4 and key round trips exact";
  return o;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Outcome criterion10(const NamedClip& clip, const BinaryImage& mark) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("gftmark-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir / "clips");
  write_wav(clip.clip, dir / "clips" / (clip.label + ".wav"));
  write_pbm(mark, dir / "mark.pbm");
  const std::string cmd = std::string("\"") + GFTMARK_CLI_PATH + "\" evaluate --clips " +
                          (dir / "clips").string() + " --watermark " + (dir / "mark.pbm").string() +
                          " --out " + (dir / "report.csv").string() + " --dump-features " +
                          (dir / "features.csv").string() + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  o.require(WIFEXITED(raw) && WEXITSTATUS(raw) == 0, "evaluate exited with status " + std::to_string(raw));

  std::ifstream in(dir / "features.csv");
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  if (std::getline(in, line)) {
    header = split_csv(line);
    columns.resize(header.size());
    while (std::getline(in, line)) {
      const auto cells = split_csv(line);
      for (std::size_t i = 0; i < cells.size() && i < columns.size(); ++i) columns[i].push_back(std::stod(cells[i]));
    }
  }
  fs::remove_all(dir);

  auto column = [&](const std::string& name) -> const std::vector<double>* {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? nullptr : &columns[it - header.begin()];
  };
  const auto* clean = column("clean");
  o.require(clean != nullptr && clean->size() == 4096, "missing clean trace");
  std::string summary;
  for (const char* label : {"awgn-20dB", "resample-22050Hz"}) {
    const auto* trace = column(label);
    if (!clean || !trace) {
      o.require(false, std::string("missing trace ") + label);
      continue;
    }
    const double r = pearson(*clean, *trace);
    o.require(r > 0.9, std::string(label) + " Pearson " + fmt("%.4f", r));
    summary += std::string("r(clean, ") + label + ")=" + fmt("%.4f", r) + " ";
  }
  if (o.pass) o.detail = summary;
  return o;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<NamedClip> clips = make_clips();
  const BinaryImage mark = make_watermark();
  const BitSequence w = image_to_bits(mark);
  SchemeConfig scheme;
  scheme.k = 3;
  scheme.watermark_length = w.size();
  std::printf("setup: %zu synthetic 64 s clips in %.1f s, M=%zu, k=%zu\n", clips.size(), seconds_since(t0),
              scheme.watermark_length, scheme.k);

  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("criterion %2d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };
  report(1, "lossless involution", criterion1(clips, w, scheme));
  report(2, "GFT correctness", criterion2());
  report(3, "shift operator oracle", criterion3());
  report(4, "K-means oracle", criterion4());
  report(5, "amplitude robustness", criterion5(clips, w, scheme));
  report(6, "common-attack guardrails", criterion6(clips, w, scheme));
  report(7, "synchronization guardrails", criterion7(clips, w, scheme));
  report(8, "attack self-checks", criterion8(clips, scheme));
  report(9, "format round trips", criterion9());
  report(10, "feature traces", criterion10(clips.front(), mark));
  std::printf("%d of 10 criteria failed (%.1f s)\n", failed, seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
