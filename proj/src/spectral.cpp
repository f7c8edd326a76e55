#include "mwd/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mwd {

namespace {

// The FFTW planner is not reentrant; plans are created once per length under a
// lock and then executed through the new-array interface, which is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan r2c(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        plan_(PlanCache::instance().r2c(static_cast<int>(n))),
        in_(fftw_alloc_real(n)),
        out_(fftw_alloc_complex(n / 2 + 1)) {}

  double* input() { return in_.get(); }

  // Returns |X_k|^2 into `dst` (size n/2 + 1).
  void power(std::vector<double>& dst) {
    fftw_execute_dft_r2c(plan_, in_.get(), out_.get());
    dst.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = out_.get()[k][0] * out_.get()[k][0] + out_.get()[k][1] * out_.get()[k][1];
  }

 private:
  std::size_t n_;
  fftw_plan plan_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
};

}  // namespace

std::vector<double> power_spectrum(std::span<const double> y) {
  if (y.empty()) throw invalid_argument("power spectrum of empty series");
  RealFft fft(y.size());
  std::copy(y.begin(), y.end(), fft.input());
  std::vector<double> p;
  fft.power(p);
  return p;
}

Psd welch_psd(std::span<const double> y, double fs, const WelchConfig& cfg) {
  if (!(fs > 0.0)) throw invalid_argument("welch: sampling rate must be positive");
  if (y.size() < 2) throw invalid_argument("welch: series too short");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw invalid_argument("welch: overlap must be in [0, 1)");
  auto seg = static_cast<std::size_t>(std::llround(cfg.segment_s * fs));
  seg = std::clamp<std::size_t>(seg, 2, y.size());
  const std::size_t step = std::max<std::size_t>(1, seg - static_cast<std::size_t>(std::llround(cfg.overlap * static_cast<double>(seg))));
  const std::size_t n_seg = 1 + (y.size() - seg) / step;

  std::vector<double> win(seg, 1.0);
  if (cfg.window == Window::Hann)
    for (std::size_t i = 0; i < seg; ++i)
      win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg));
  double win_ss = 0.0;
  for (double w : win) win_ss += w * w;

  RealFft fft(seg);
  std::vector<double> acc(seg / 2 + 1, 0.0);
  std::vector<double> p;
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double* src = y.data() + s * step;
    double mu = 0.0;
    if (cfg.detrend_constant) {
      for (std::size_t i = 0; i < seg; ++i) mu += src[i];
      mu /= static_cast<double>(seg);
    }
    double* in = fft.input();
    for (std::size_t i = 0; i < seg; ++i) in[i] = (src[i] - mu) * win[i];
    fft.power(p);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
  }

  Psd out;
  out.freqs.resize(acc.size());
  out.power.resize(acc.size());
  const double scale = 1.0 / (fs * win_ss * static_cast<double>(n_seg));
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(seg);
    const bool edge = k == 0 || (seg % 2 == 0 && k == seg / 2);
    out.power[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

}  // namespace mwd
