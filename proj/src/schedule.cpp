#include "eitc/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace eitc {

NoiseSchedule make_schedule(int T, double beta_min, double beta_max) {
    if (T < 10) throw std::invalid_argument("make_schedule: T must be >= 10");
    if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0))
        throw std::invalid_argument("make_schedule: need 0 < beta_min < beta_max < 1");
    NoiseSchedule s;
    s.T = T;
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    s.sigma.resize(T);
    double prod = 1.0;
    for (int t = 0; t < T; ++t) {
        const double beta = beta_min + (beta_max - beta_min) * t / double(T - 1);
        s.alpha[t] = 1.0 - beta;
        prod *= s.alpha[t];
        s.alpha_bar[t] = prod;
        const double denom = 1.0 - s.alpha_bar[t];
        s.sigma[t] = (denom > 0.0)
                         ? std::sqrt((s.alpha[t] - s.alpha_bar[t]) * (1.0 - s.alpha[t]) / denom)
                         : 0.0;
    }
    if (!(s.alpha_bar[T - 1] < 1e-3))
        throw std::invalid_argument("make_schedule: alpha_bar_T must be < 1e-3 (schedule too mild)");
    return s;
}

Eigen::VectorXd gaussian_vector(int d, Rng& rng) {
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) w[i] = rng.normal();
    return w;
}

Eigen::VectorXd forward_noise(const Eigen::VectorXd& x0, int t, const NoiseSchedule& schedule,
                              Rng& rng) {
    if (t < 1 || t > schedule.T) throw std::invalid_argument("forward_noise: t out of range");
    const double ab = schedule.abar(t);
    return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * gaussian_vector(int(x0.size()), rng);
}

Eigen::VectorXd analytic_score_target(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x0,
                                      int t, const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.T) throw std::invalid_argument("analytic_score_target: t out of range");
    const double ab = schedule.abar(t);
    return -(x_t - std::sqrt(ab) * x0) / (1.0 - ab);
}

} // namespace eitc
