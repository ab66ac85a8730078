// Forward noising process: the {alpha_t} schedule, its cumulative products,
// the per-step reverse noise scale, and the analytic conditional score.
#pragma once

#include "eitc/rng.hpp"

#include <Eigen/Dense>

namespace eitc {

struct NoiseSchedule {
    int T = 0;
    Eigen::VectorXd alpha;     // alpha_t, t = 1..T (0-based storage)
    Eigen::VectorXd alpha_bar; // running products
    Eigen::VectorXd sigma;     // sqrt((alpha_t - alpha_bar_t)(1 - alpha_t)/(1 - alpha_bar_t))

    double a(int t) const { return alpha[t - 1]; }
    double abar(int t) const { return alpha_bar[t - 1]; }
    double sig(int t) const { return sigma[t - 1]; }
};

/// Linear beta grid from beta_min to beta_max over T steps; rejects schedules
/// whose terminal alpha_bar fails the "approximately zero" requirement
/// (alpha_bar_T < 1e-3).
NoiseSchedule make_schedule(int T, double beta_min, double beta_max);

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) w, w ~ N(0, I).
Eigen::VectorXd forward_noise(const Eigen::VectorXd& x0, int t, const NoiseSchedule& schedule,
                              Rng& rng);

/// Analytic score of p(x_t | x0): -(x_t - sqrt(abar_t) x0) / (1 - abar_t).
Eigen::VectorXd analytic_score_target(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x0,
                                      int t, const NoiseSchedule& schedule);

/// Standard normal vector, coordinates drawn in order.
Eigen::VectorXd gaussian_vector(int d, Rng& rng);

} // namespace eitc
