#include "eitc/sampler.hpp"

#include "eitc/vecmat.hpp"

#include <cmath>
#include <stdexcept>

namespace eitc {

Eigen::MatrixXd complete(const Eigen::MatrixXd& observed, const Mask& mask,
                         const ScoreModel& model, const NoiseSchedule& schedule, Rng& rng,
                         const SampleOptions& opts) {
    const int nb = int(observed.rows());
    if (observed.cols() != nb || mask.m.rows() != nb || mask.m.cols() != nb)
        throw std::invalid_argument("complete: observed/mask shape mismatch");
    const int d = nb * nb;
    if (model.dim() != d)
        throw std::invalid_argument("complete: mask size does not match the model's trained N_B");

    Condition z;
    z.observed = vec_rowmajor(observed);
    z.mask = vec_rowmajor(mask.m);

    Eigen::VectorXd y = gaussian_vector(d, rng); // Y_T
    for (int t = schedule.T; t >= 1; --t) {
        const Eigen::VectorXd s = model.score(y, z, t);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        if (!opts.noise_free && schedule.sig(t) > 0.0) w = gaussian_vector(d, rng);
        y = (y + (1.0 - schedule.a(t)) * s + schedule.sig(t) * w) / std::sqrt(schedule.a(t));
    }
    return unvec_rowmajor(y, nb, nb);
}

Eigen::MatrixXd posterior_mean(const Eigen::MatrixXd& observed, const Mask& mask,
                               const ScoreModel& model, const NoiseSchedule& schedule,
                               int n_samples, std::uint64_t seed, bool parallel,
                               const SampleOptions& opts) {
    if (n_samples < 1) throw std::invalid_argument("posterior_mean: n_samples must be >= 1");
    const int nb = int(observed.rows());
    std::vector<Eigen::MatrixXd> draws(n_samples);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int k = 0; k < n_samples; ++k) {
        Rng rng(split_seed(seed, "posterior-chain", std::uint64_t(k)));
        draws[k] = complete(observed, mask, model, schedule, rng, opts);
    }
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(nb, nb);
    for (const auto& d : draws) mean += d;
    return mean / double(n_samples);
}

} // namespace eitc
