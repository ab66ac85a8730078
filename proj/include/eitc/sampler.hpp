// Conditional DDPM sampling for measurement completion: starting from
// Gaussian noise, run the reverse chain
//   Y_{t-1} = (Y_t + (1 - alpha_t) s_theta(Y_t, z, t) + sigma_t W_t) / sqrt(alpha_t)
// down to Y_0 and reshape to the measurement table.
#pragma once

#include "eitc/denoiser.hpp"
#include "eitc/measurements.hpp"
#include "eitc/schedule.hpp"

#include <Eigen/Dense>
#include <cstdint>

namespace eitc {

struct SampleOptions {
    bool noise_free = false; // all W_t = 0: deterministic trajectory fixture
};

/// One reverse-diffusion completion conditioned on (observed, mask).
Eigen::MatrixXd complete(const Eigen::MatrixXd& observed, const Mask& mask,
                         const ScoreModel& model, const NoiseSchedule& schedule, Rng& rng,
                         const SampleOptions& opts = {});

/// Coordinatewise mean of n_samples independent completions; chains use seeds
/// derived from `seed` and may run in parallel (result is identical either
/// way).
Eigen::MatrixXd posterior_mean(const Eigen::MatrixXd& observed, const Mask& mask,
                               const ScoreModel& model, const NoiseSchedule& schedule,
                               int n_samples, std::uint64_t seed, bool parallel = true,
                               const SampleOptions& opts = {});

} // namespace eitc
