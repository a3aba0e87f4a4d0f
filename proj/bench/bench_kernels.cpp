// Serial reference kernels vs their OpenMP counterparts.

#include <chrono>
#include <cstdio>
#include <functional>
#include <omp.h>

#include "gftmark/attacks.hpp"
#include "gftmark/dsp.hpp"
#include "gftmark/synth.hpp"
#include "gftmark/watermark.hpp"

using namespace gftmark;

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-22s serial %9.2f ms   omp %9.2f ms   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const AudioClip clip = synthesize_music({64.0, 44100.0, 7});
  const auto frames = frame_signal(clip, 4096);

  volatile double sink = 0.0;
  report("extract_features",
         time_ms([&] { sink = reference::extract_features(frames, 3)[0]; }),
         time_ms([&] { sink = extract_features(frames, 3)[0]; }));
  report("awgn",
         time_ms([&] { sink = reference::awgn(clip, 20.0, 1).samples[0]; }),
         time_ms([&] { sink = awgn(clip, 20.0, 1).samples[0]; }));
  const dsp::RationalResampler down(44100.0, 22050.0);
  report("resample 44.1k->22.05k",
         time_ms([&] { sink = down.process_serial(clip.samples)[0]; }),
         time_ms([&] { sink = down.process(clip.samples)[0]; }));
  (void)sink;
  return 0;
}
