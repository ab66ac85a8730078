// Score-matching training loop: per step, sample a batch of full measurement
// tables and masks, form conditions, noise each sample at a uniform timestep,
// regress the model score onto the analytic conditional score, and take an
// AdamW step with an EMA copy of the parameters.
#pragma once

#include "eitc/denoiser.hpp"
#include "eitc/measurements.hpp"
#include "eitc/schedule.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace eitc {

/// Distribution of observation patterns the training conditions on.
struct MaskDistribution {
    MaskKind kind = MaskKind::Principal;
    double rate = 0.01;      // principal/random rate
    double rate_max = -1.0;  // > rate: draw the rate log-uniformly per mask
    int level = 3;           // hierarchical
    double s_offdiag = 0.15; // hierarchical

    Mask draw(int n_boundary, Rng& rng) const;
};

struct OptimizerConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-4;
    double ema_decay = 0.999;
    double clip_norm = 0.0; // 0 disables gradient clipping
    int steps = 2000;
    /// Positive weight lambda(t) of the score-matching loss. Defaults to
    /// (1 - abar_t)^2 / abar_t, which makes the regression the plain
    /// clean-measurement MSE with t-uniform gradient scale; lambda(t) == 1
    /// leaves the raw score residual (its gradients span eight orders of
    /// magnitude across t and stall the high-noise steps).
    std::function<double(int, const NoiseSchedule&)> lambda_t;
};

double default_lambda_weight(int t, const NoiseSchedule& schedule);

struct TrainResult {
    Eigen::VectorXd theta;     // final raw parameters
    Eigen::VectorXd theta_ema; // exponential moving average
    std::vector<std::pair<int, double>> loss_trace;
    double holdout_initial = 0.0;
    double holdout_final = 0.0;
};

/// Algorithm: per batch element draw (x0, mask), set z = (mask .* x0, mask),
/// t ~ U{1..T}, x_t by forward noising, and minimize the mean of
/// lambda(t) ||s_theta(x_t, z, t) - s*(x_t)||^2 with lambda == 1.
/// Per-sample gradients are reduced in sample order, so results are bitwise
/// reproducible for a fixed seed at any worker count. Throws on divergence.
TrainResult train(const std::vector<Eigen::MatrixXd>& dataset, const MaskDistribution& masks,
                  const NoiseSchedule& schedule, ScoreModel& model, const OptimizerConfig& opt,
                  int batch, std::uint64_t seed,
                  const std::vector<Eigen::MatrixXd>* holdout = nullptr);

/// Mean loss of the model on fixed draws from `samples` (fixed eval seed), no
/// gradients. Used for the held-out before/after comparison.
double evaluate_loss(const std::vector<Eigen::MatrixXd>& samples, const MaskDistribution& masks,
                     const NoiseSchedule& schedule, const ScoreModel& model, int batch,
                     std::uint64_t seed,
                     const std::function<double(int, const NoiseSchedule&)>& lambda_t = {});

} // namespace eitc
