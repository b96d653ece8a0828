// Geometric VE noise ladder sigma_i = sigma_min * (sigma_max / sigma_min)^(i / (I - 1)).
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddugm {

class NoiseSchedule {
 public:
  NoiseSchedule(std::size_t steps, double sigma_min, double sigma_max, double snr)
      : steps_(steps), sigma_min_(sigma_min), sigma_max_(sigma_max), snr_(snr) {
    if (steps < 2) throw std::invalid_argument("NoiseSchedule: need at least 2 steps");
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
      throw std::invalid_argument("NoiseSchedule: require 0 < sigma_min < sigma_max");
    if (!(snr > 0.0)) throw std::invalid_argument("NoiseSchedule: snr must be positive");
  }

  std::size_t steps() const { return steps_; }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }
  double snr() const { return snr_; }

  double sigma_at(std::size_t i) const {
    if (i >= steps_)
      throw std::out_of_range("sigma_at: index " + std::to_string(i) + " outside [0, " + std::to_string(steps_ - 1) + "]");
    if (i == 0) return sigma_min_;
    if (i == steps_ - 1) return sigma_max_;
    const double frac = static_cast<double>(i) / static_cast<double>(steps_ - 1);
    return sigma_min_ * std::pow(sigma_max_ / sigma_min_, frac);
  }

 private:
  std::size_t steps_;
  double sigma_min_, sigma_max_, snr_;
};

inline double sigma_at(const NoiseSchedule& schedule, std::size_t i) { return schedule.sigma_at(i); }

}  // namespace ddugm
