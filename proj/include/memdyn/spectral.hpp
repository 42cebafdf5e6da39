#ifndef MEMDYN_SPECTRAL_HPP_
#define MEMDYN_SPECTRAL_HPP_

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace memdyn
{

enum class Window
{
  Hann,
  Rectangular,
};

inline std::vector<double> make_window(Window w, std::size_t n)
{
  std::vector<double> out(n, 1.0);
  if (w == Window::Hann && n > 1) {
    // Periodic Hann keeps 50% overlap at constant gain.
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
  }
  return out;
}

struct Psd
{
  std::vector<double> freq;   ///< Hz
  std::vector<double> power;  ///< unit^2 / Hz, single-sided
  double df = 0.0;
  std::size_t segments = 0;

  /// Integral of the PSD over all bins.
  double total() const
  {
    double s = 0.0;
    for (const double v : power) {
      s += v;
    }
    return s * df;
  }
};

namespace detail
{

/// Planner calls are not thread-safe in FFTW; executes are.
inline std::mutex & fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

class RealFft
{
public:
  explicit RealFft(std::size_t n)
  : n_(n),
    in_(fftw_alloc_real(n), fftw_free),
    out_(fftw_alloc_complex(n / 2 + 1), fftw_free)
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    if (!plan_) {
      throw std::runtime_error("FFTW plan creation failed");
    }
  }

  RealFft(const RealFft &) = delete;
  RealFft & operator=(const RealFft &) = delete;

  ~RealFft()
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  double * input() { return in_.get(); }

  /// Squared magnitudes of bins 0..n/2 after transforming the current input.
  void power(std::vector<double> & out)
  {
    fftw_execute(plan_);
    out.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      out[k] = out_.get()[k][0] * out_.get()[k][0] + out_.get()[k][1] * out_.get()[k][1];
    }
  }

private:
  std::size_t n_;
  std::unique_ptr<double, decltype(&fftw_free)> in_;
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> out_;
  fftw_plan plan_ = nullptr;
};

/// Adds one windowed segment's single-sided periodogram (unnormalised) into acc.
inline void accumulate_segment(RealFft & fft, const double * x, const std::vector<double> & win, std::vector<double> & tmp,
                               std::vector<double> & acc)
{
  const std::size_t n = win.size();
  for (std::size_t k = 0; k < n; ++k) {
    fft.input()[k] = x[k] * win[k];
  }
  fft.power(tmp);
  for (std::size_t k = 0; k < tmp.size(); ++k) {
    acc[k] += tmp[k];
  }
}

inline Psd finish_psd(std::vector<double> acc, std::size_t nseg, std::size_t n, double fs, const std::vector<double> & win)
{
  double wss = 0.0;
  for (const double w : win) {
    wss += w * w;
  }
  Psd psd;
  psd.df = fs / static_cast<double>(n);
  psd.segments = nseg;
  psd.freq.resize(acc.size());
  psd.power.resize(acc.size());
  const double scale = 1.0 / (fs * wss * static_cast<double>(nseg));
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    psd.freq[k] = static_cast<double>(k) * psd.df;
    psd.power[k] = (edge ? 1.0 : 2.0) * acc[k] * scale;
  }
  return psd;
}

}  // namespace detail

/**
 * @brief Welch single-sided PSD: windowed segments, fractional overlap, averaged periodograms.
 */
inline Psd welch_psd(const std::vector<double> & x, double fs, std::size_t segment, double overlap = 0.5,
                     Window window = Window::Hann)
{
  if (x.empty()) {
    throw std::invalid_argument("welch_psd: empty series");
  }
  if (segment == 0 || segment > x.size()) {
    throw std::invalid_argument("welch_psd: segment length must be in [1, series length]");
  }
  if (!(overlap >= 0.0 && overlap < 1.0) || !(fs > 0.0)) {
    throw std::invalid_argument("welch_psd: overlap must be in [0, 1) and fs positive");
  }
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(segment * (1.0 - overlap))));
  const auto win = make_window(window, segment);
  detail::RealFft fft(segment);
  std::vector<double> acc(segment / 2 + 1, 0.0);
  std::vector<double> tmp;
  std::size_t nseg = 0;
  for (std::size_t start = 0; start + segment <= x.size(); start += hop) {
    detail::accumulate_segment(fft, x.data() + start, win, tmp, acc);
    ++nseg;
  }
  return detail::finish_psd(std::move(acc), nseg, segment, fs, win);
}

struct Spectrogram
{
  std::vector<double> time;  ///< segment centres, s
  std::vector<double> freq;  ///< Hz
  std::vector<std::vector<double>> power;  ///< [time][freq], unit^2/Hz
  double df = 0.0;
  std::size_t segment = 0;
  std::size_t hop = 0;
  Window window = Window::Hann;
};

/**
 * @brief One windowed periodogram per column; columns start every @p hop samples.
 *
 * @param sub_segment when nonzero, each column is itself a Welch average of
 *        sub-segments of this length with 50% overlap.
 */
inline Spectrogram spectrogram(const std::vector<double> & x, double fs, std::size_t segment, std::size_t hop,
                               Window window = Window::Hann, std::size_t sub_segment = 0)
{
  if (x.empty()) {
    throw std::invalid_argument("spectrogram: empty series");
  }
  if (segment == 0 || segment > x.size() || hop == 0) {
    throw std::invalid_argument("spectrogram: bad segment or hop");
  }
  const std::size_t n = sub_segment ? sub_segment : segment;
  if (n > segment) {
    throw std::invalid_argument("spectrogram: sub-segment longer than segment");
  }
  const auto win = make_window(window, n);
  detail::RealFft fft(n);
  Spectrogram sg;
  sg.segment = segment;
  sg.hop = hop;
  sg.window = window;
  std::vector<double> tmp;
  for (std::size_t start = 0; start + segment <= x.size(); start += hop) {
    std::vector<double> acc(n / 2 + 1, 0.0);
    std::size_t nseg = 0;
    const std::size_t sub_hop = sub_segment ? std::max<std::size_t>(1, n / 2) : segment;
    for (std::size_t s = start; s + n <= start + segment; s += sub_hop) {
      detail::accumulate_segment(fft, x.data() + s, win, tmp, acc);
      ++nseg;
    }
    Psd col = detail::finish_psd(std::move(acc), nseg, n, fs, win);
    if (sg.freq.empty()) {
      sg.freq = col.freq;
      sg.df = col.df;
    }
    sg.time.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(segment)) / fs);
    sg.power.push_back(std::move(col.power));
  }
  return sg;
}

/// Sum of PSD * df over bins whose centre lies in [f_lo, f_hi].
inline double band_power(const std::vector<double> & freq, const std::vector<double> & power, double df, double f_lo,
                         double f_hi)
{
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < freq.size(); ++k) {
    if (freq[k] >= f_lo && freq[k] <= f_hi) {
      s += power[k];
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("band_variance: band contains no frequency bins");
  }
  return s * df;
}

inline double band_variance(const Psd & psd, double f_lo, double f_hi)
{
  return band_power(psd.freq, psd.power, psd.df, f_lo, f_hi);
}

/// Per column, the integral of the PSD over [f_lo, f_hi].
inline std::vector<double> band_variance(const Spectrogram & sg, double f_lo, double f_hi)
{
  std::vector<double> out;
  out.reserve(sg.power.size());
  for (const auto & col : sg.power) {
    out.push_back(band_power(sg.freq, col, sg.df, f_lo, f_hi));
  }
  return out;
}

/**
 * @brief RMS of a spectral line: PSD integrated over f0 +/- half_width, minus the
 * median floor of the two adjacent bands of equal width, square-rooted.
 */
inline double tone_rms(const Psd & psd, double f0, double half_width = 25.0)
{
  if (!(half_width >= 2.0 * psd.df)) {
    throw std::invalid_argument("tone_rms: half-width must span at least two frequency bins");
  }
  std::vector<double> floor;
  double peak = 0.0;
  std::size_t peak_bins = 0;
  for (std::size_t k = 0; k < psd.freq.size(); ++k) {
    const double d = std::abs(psd.freq[k] - f0);
    if (d <= half_width) {
      peak += psd.power[k];
      ++peak_bins;
    } else if (d <= 3.0 * half_width) {
      floor.push_back(psd.power[k]);
    }
  }
  if (peak_bins == 0) {
    throw std::invalid_argument("tone_rms: window contains no bins");
  }
  double median = 0.0;
  if (!floor.empty()) {
    std::nth_element(floor.begin(), floor.begin() + static_cast<std::ptrdiff_t>(floor.size() / 2), floor.end());
    median = floor[floor.size() / 2];
  }
  const double v = (peak - median * static_cast<double>(peak_bins)) * psd.df;
  return std::sqrt(std::max(0.0, v));
}

struct QuadratureTrace
{
  std::vector<double> time;
  std::vector<double> vx;
  std::vector<double> vy;
  double f0 = 0.0;
  double bandwidth = 0.0;
};

/**
 * @brief Lock-in demodulation at f0.
 *
 * Mixes with 2cos / -2sin, low-passes through four identical one-pole
 * sections whose cascade has its -3 dB point at bandwidth / 2, and keeps every
 * @p decimation-th sample. A cos(2 pi f0 t + phi) maps to (A cos phi, A sin phi).
 */
inline QuadratureTrace demodulate(const std::vector<double> & x, double fs, double f0, double bandwidth,
                                  std::size_t decimation = 0, double phase = 0.0)
{
  if (!(f0 > 0.0) || !(f0 < 0.5 * fs)) {
    throw std::invalid_argument("demodulate: f0 must lie in (0, fs/2)");
  }
  if (!(bandwidth > 0.0) || !(bandwidth < 0.1 * f0)) {
    throw std::invalid_argument("demodulate: bandwidth must be positive and below f0/10");
  }
  const double f3db = 0.5 * bandwidth;
  const double fc = f3db / std::sqrt(std::pow(2.0, 0.25) - 1.0);
  const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * fc / fs);
  if (decimation == 0) {
    decimation = std::max<std::size_t>(1, static_cast<std::size_t>(fs / (20.0 * bandwidth)));
  }
  QuadratureTrace q;
  q.f0 = f0;
  q.bandwidth = bandwidth;
  std::array<double, 4> sx{};
  std::array<double, 4> sy{};
  const double w = 2.0 * std::numbers::pi * f0 / fs;
  // Rotate the local oscillator recursively, renormalising to stop drift.
  std::complex<double> lo = std::polar(1.0, phase);
  const std::complex<double> step = std::polar(1.0, w);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double ix = 2.0 * x[k] * lo.real();
    double iy = -2.0 * x[k] * lo.imag();
    for (int s = 0; s < 4; ++s) {
      sx[s] += a * (ix - sx[s]);
      sy[s] += a * (iy - sy[s]);
      ix = sx[s];
      iy = sy[s];
    }
    if (k % decimation == 0) {
      q.time.push_back(static_cast<double>(k) / fs);
      q.vx.push_back(sx[3]);
      q.vy.push_back(sy[3]);
    }
    lo *= step;
    if (k % 4096 == 0) {
      lo = std::polar(1.0, w * static_cast<double>(k + 1) + phase);
    }
  }
  return q;
}

/// Centred moving average over n samples, shrinking at the ends.
inline std::vector<double> moving_average(const std::vector<double> & x, std::size_t n)
{
  if (n == 0) {
    throw std::invalid_argument("moving_average: window must be positive");
  }
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    prefix[k + 1] = prefix[k] + x[k];
  }
  std::vector<double> out(x.size());
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(x.size(), lo + n);
    out[k] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace memdyn

#endif  // MEMDYN_SPECTRAL_HPP_
