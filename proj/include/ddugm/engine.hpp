// Dual-domain predictor-corrector reconstruction loop.
//
// Per outer step i = I-2 ... 0 (the state starts at sigma_{I-1} = sigma_max) and per frame:
//   1. predictor on weighted k-space v_W and on the image u
//   2. unweight, data consistency on both branches, reweight
//   3. J corrector sweeps on both branches
//   4. unweight, data consistency on both branches
// then across frames:
//   5. temporal Hankel rank-a projection of the k-space branch
//   6. fusion g* = eta1 v* + eta2 F(u*), data consistency on g*
//   7. both branches restart from g* (v_W <- W g*, u <- F^-1 g*)
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddugm/consistency.hpp"
#include "ddugm/fft.hpp"
#include "ddugm/hankel.hpp"
#include "ddugm/metrics.hpp"
#include "ddugm/rng.hpp"
#include "ddugm/sampler.hpp"
#include "ddugm/schedule.hpp"
#include "ddugm/score.hpp"
#include "ddugm/weighting.hpp"

namespace ddugm {

enum class DomainMode { dual, kspace_only, image_only };

inline std::string_view to_string(DomainMode m) {
  switch (m) {
    case DomainMode::dual: return "dual";
    case DomainMode::kspace_only: return "kspace_only";
    case DomainMode::image_only: return "image_only";
  }
  return "?";
}

inline DomainMode parse_domain_mode(std::string_view s) {
  if (s == "dual") return DomainMode::dual;
  if (s == "kspace_only") return DomainMode::kspace_only;
  if (s == "image_only") return DomainMode::image_only;
  throw std::invalid_argument("unknown domain_mode '" + std::string(s) + "'");
}

struct ReconConfig {
  std::size_t steps = 1000;           // I
  std::size_t corrector_steps = 1;    // J
  double sigma_min = 0.01;
  double sigma_max = 4.0;
  double snr = 0.075;                 // r
  WeightParams weight{};
  std::size_t hankel_window = 0;      // 0: floor(T/2) + 1
  std::size_t hankel_rank = 0;        // 0: min(6, w - 1)
  std::size_t lowrank_every = 1;      // 0 disables the projection
  FusionWeights fusion{};
  std::uint64_t seed = 0;
  DomainMode domain_mode = DomainMode::dual;
  std::size_t log_every = 10;

  NoiseSchedule schedule() const { return NoiseSchedule(steps, sigma_min, sigma_max, snr); }

  /// Window/rank with the automatic defaults filled in for a T-frame sequence.
  HankelConfig hankel(std::size_t frames) const {
    HankelConfig cfg = default_hankel_config(frames);
    if (hankel_window) {
      cfg.window = hankel_window;
      if (!hankel_rank) cfg.rank = std::max<std::size_t>(1, std::min<std::size_t>(6, cfg.window - 1));
    }
    if (hankel_rank) cfg.rank = hankel_rank;
    return cfg;
  }

  void validate() const {
    (void)schedule();
    if (log_every == 0) throw std::invalid_argument("log_every must be positive");
    WeightMatrix probe(1, 1, weight);
    fusion.validate();
  }
};

struct ConvergenceEntry {
  std::size_t step = 0;
  double sigma = 0.0;
  std::optional<double> psnr;
  double dc_residual = 0.0;
};

struct ConvergenceLog {
  std::vector<ConvergenceEntry> entries;
};

struct ReconResult {
  DynamicTensor image;
  DynamicTensor kspace;  // final g*
  ConvergenceLog log;
};

/// Raised for NaN/Inf state and for failures inside a score provider.
class ReconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Called after every outer step with the step index and the post-consistency g*.
using StepObserver = std::function<void(std::size_t step, const DynamicTensor& g_star)>;

inline DynamicTensor zero_filled(const DynamicTensor& b, const SamplingMask& mask) {
  return ifft2c(apply_mask(b, mask));
}

class ReconEngine {
 public:
  ReconEngine(ReconConfig cfg, ScoreProvider* kspace_score, ScoreProvider* image_score)
      : cfg_(cfg), k_score_(kspace_score), i_score_(image_score) {
    cfg_.validate();
    if (uses_kspace() && !k_score_) throw std::invalid_argument("reconstruct: k-space score provider required");
    if (uses_image() && !i_score_) throw std::invalid_argument("reconstruct: image score provider required");
    if (uses_kspace() && k_score_->domain() != ScoreDomain::kspace)
      throw std::invalid_argument("reconstruct: k-space provider is declared for the image domain");
    if (uses_image() && i_score_->domain() != ScoreDomain::image)
      throw std::invalid_argument("reconstruct: image provider is declared for the k-space domain");
  }

  void set_observer(StepObserver observer) { observer_ = std::move(observer); }

  ReconResult run(const DynamicTensor& b, const SamplingMask& mask,
                  const std::optional<DynamicTensor>& reference = std::nullopt) {
    require_same_shape(b.shape(), mask.shape(), "reconstruct");
    if (reference) require_same_shape(b.shape(), reference->shape(), "reconstruct reference");
    const FusionConfig fusion(cfg_.fusion, b, mask);
    const NoiseSchedule schedule = cfg_.schedule();
    const WeightMatrix weight(b.height(), b.width(), cfg_.weight);
    const Shape3 shape = b.shape();
    const Shape3 one{1, shape.height, shape.width};
    const bool lowrank = uses_kspace() && cfg_.lowrank_every > 0 && shape.frames >= 2;
    HankelConfig hankel;
    if (lowrank) {
      hankel = cfg_.hankel(shape.frames);
      hankel.validate(shape.frames);
    }
    const std::uint64_t seed = cfg_.seed;
    const std::size_t top = schedule.steps() - 1;

    DynamicTensor v_w(shape), u(shape);
    for (std::size_t t = 0; t < shape.frames; ++t) {
      if (uses_kspace()) {
        RngStream rng(seed, Lane{Branch::kspace, t, top, 0, Phase::prior});
        v_w.set_frame(t, sample_prior(one, schedule.sigma_max(), rng));
      }
      if (uses_image()) {
        RngStream rng(seed, Lane{Branch::image, t, top, 0, Phase::prior});
        u.set_frame(t, sample_prior(one, schedule.sigma_max(), rng));
      }
    }

    ReconResult result;
    DynamicTensor v(shape), g(shape);
    std::size_t outer = 0;
    for (std::size_t i = top; i-- > 0; ++outer) {
      for (std::size_t t = 0; t < shape.frames; ++t) {
        if (uses_kspace()) v.set_frame(t, kspace_branch(v_w.frame(t), t, i, schedule, weight, fusion));
        if (uses_image()) u.set_frame(t, image_branch(u.frame(t), t, i, schedule, fusion));
      }
      if (uses_kspace() && lowrank && outer % cfg_.lowrank_every == 0) v = lowrank_project(v, hankel);

      switch (cfg_.domain_mode) {
        case DomainMode::dual: g = fuse(v, u, cfg_.fusion); break;
        case DomainMode::kspace_only: g = v; break;
        case DomainMode::image_only: g = fft2c(u); break;
      }
      g = data_consistency(g, fusion);
      if (!all_finite(g))
        throw ReconError("non-finite state after step " + std::to_string(i) + " (sigma " +
                         std::to_string(schedule.sigma_at(i)) + "); check score providers and sigma_max");

      if (i % cfg_.log_every == 0) {
        ConvergenceEntry e{i, schedule.sigma_at(i), std::nullopt, dc_residual(g, fusion)};
        if (std::isinf(cfg_.fusion.mu) && e.dc_residual != 0.0)
          throw ReconError("data consistency violated at step " + std::to_string(i));
        if (reference) e.psnr = psnr(*reference, ifft2c(g));
        result.log.entries.push_back(e);
      }
      if (observer_) observer_(i, g);

      if (uses_kspace()) v_w = weight_apply(g, weight);
      if (uses_image()) u = ifft2c(g);
    }
    result.image = ifft2c(g);
    result.kspace = std::move(g);
    return result;
  }

 private:
  bool uses_kspace() const { return cfg_.domain_mode != DomainMode::image_only; }
  bool uses_image() const { return cfg_.domain_mode != DomainMode::kspace_only; }

  DynamicTensor kspace_branch(DynamicTensor vw, std::size_t t, std::size_t i, const NoiseSchedule& schedule,
                              const WeightMatrix& weight, const FusionConfig& fusion) {
    {
      RngStream rng(cfg_.seed, Lane{Branch::kspace, t, i, 0, Phase::predictor});
      vw = guarded(*k_score_, t, i, [&] { return predictor(vw, *k_score_, i, schedule, rng); });
    }
    vw = weight_apply(data_consistency(weight_remove(vw, weight), fusion, t), weight);
    for (std::size_t j = 1; j <= cfg_.corrector_steps; ++j) {
      RngStream rng(cfg_.seed, Lane{Branch::kspace, t, i, j, Phase::corrector});
      vw = guarded(*k_score_, t, i, [&] { return corrector(vw, *k_score_, i, schedule, rng); });
    }
    return data_consistency(weight_remove(vw, weight), fusion, t);
  }

  DynamicTensor image_branch(DynamicTensor x, std::size_t t, std::size_t i, const NoiseSchedule& schedule,
                             const FusionConfig& fusion) {
    {
      RngStream rng(cfg_.seed, Lane{Branch::image, t, i, 0, Phase::predictor});
      x = guarded(*i_score_, t, i, [&] { return predictor(x, *i_score_, i, schedule, rng); });
    }
    x = ifft2c(data_consistency(fft2c(x), fusion, t));
    for (std::size_t j = 1; j <= cfg_.corrector_steps; ++j) {
      RngStream rng(cfg_.seed, Lane{Branch::image, t, i, j, Phase::corrector});
      x = guarded(*i_score_, t, i, [&] { return corrector(x, *i_score_, i, schedule, rng); });
    }
    return ifft2c(data_consistency(fft2c(x), fusion, t));
  }

  template <class F>
  DynamicTensor guarded(const ScoreProvider& provider, std::size_t t, std::size_t i, F&& step) {
    try {
      return step();
    } catch (const std::exception& e) {
      throw ReconError(std::string(to_string(provider.domain())) + " score provider " + provider.describe() +
                       " failed at step " + std::to_string(i) + ", frame " + std::to_string(t) + ": " + e.what());
    }
  }

  ReconConfig cfg_;
  ScoreProvider* k_score_;
  ScoreProvider* i_score_;
  StepObserver observer_;
};

inline ReconResult reconstruct(const DynamicTensor& b, const SamplingMask& mask, const ReconConfig& cfg,
                               ScoreProvider* kspace_score, ScoreProvider* image_score,
                               const std::optional<DynamicTensor>& reference = std::nullopt) {
  return ReconEngine(cfg, kspace_score, image_score).run(b, mask, reference);
}

}  // namespace ddugm
