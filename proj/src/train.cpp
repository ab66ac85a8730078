#include "eitc/train.hpp"

#include "eitc/vecmat.hpp"

#include <cmath>
#include <stdexcept>

namespace eitc {

Mask MaskDistribution::draw(int n_boundary, Rng& rng) const {
    double s = rate;
    if (rate_max > rate)
        s = std::exp(rng.uniform(std::log(std::max(rate, 1e-6)), std::log(rate_max)));
    const std::uint64_t seed = rng.next_u64();
    switch (kind) {
        case MaskKind::Principal: return mask_principal(n_boundary, s, seed);
        case MaskKind::Random: return mask_random(n_boundary, s, seed);
        case MaskKind::Hierarchical: return mask_hierarchical(n_boundary, level, s_offdiag, seed);
    }
    throw std::logic_error("MaskDistribution: unknown kind");
}

namespace {

struct Drawn {
    Eigen::VectorXd x0;
    Eigen::VectorXd x_t;
    Condition z;
    int t;
};

// One batch of (x0, z, t, x_t): all randomness drawn on the host thread so
// the batch content does not depend on worker count.
std::vector<Drawn> draw_batch(const std::vector<Eigen::MatrixXd>& dataset,
                              const MaskDistribution& masks, const NoiseSchedule& schedule,
                              int batch, Rng& rng) {
    std::vector<Drawn> out(batch);
    const int nb = int(dataset.front().rows());
    for (int i = 0; i < batch; ++i) {
        const auto& mat = dataset[rng.uniform_int(0, dataset.size() - 1)];
        Drawn& d = out[i];
        d.x0 = vec_rowmajor(mat);
        const Mask m = masks.draw(nb, rng);
        d.z.observed = vec_rowmajor(apply_mask(mat, m));
        d.z.mask = vec_rowmajor(m.m);
        d.t = int(rng.uniform_int(1, schedule.T));
        d.x_t = forward_noise(d.x0, d.t, schedule, rng);
    }
    return out;
}

} // namespace

double default_lambda_weight(int t, const NoiseSchedule& schedule) {
    const double ab = schedule.abar(t);
    return (1.0 - ab) * (1.0 - ab) / ab;
}

double evaluate_loss(const std::vector<Eigen::MatrixXd>& samples, const MaskDistribution& masks,
                     const NoiseSchedule& schedule, const ScoreModel& model, int batch,
                     std::uint64_t seed,
                     const std::function<double(int, const NoiseSchedule&)>& lambda_t) {
    const auto& lambda = lambda_t ? lambda_t : default_lambda_weight;
    Rng rng(seed);
    const auto drawn = draw_batch(samples, masks, schedule, batch, rng);
    double total = 0.0;
    for (const auto& d : drawn) {
        const Eigen::VectorXd target = analytic_score_target(d.x_t, d.x0, d.t, schedule);
        const Eigen::VectorXd s = model.score(d.x_t, d.z, d.t);
        total += lambda(d.t, schedule) * (s - target).squaredNorm();
    }
    return total / batch;
}

TrainResult train(const std::vector<Eigen::MatrixXd>& dataset, const MaskDistribution& masks,
                  const NoiseSchedule& schedule, ScoreModel& model, const OptimizerConfig& opt,
                  int batch, std::uint64_t seed, const std::vector<Eigen::MatrixXd>* holdout) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");

    const int np = int(model.params().size());
    Eigen::VectorXd m = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(np);
    TrainResult res;
    res.theta_ema = model.params();

    const auto& lambda = opt.lambda_t ? opt.lambda_t : default_lambda_weight;
    const std::uint64_t eval_seed = split_seed(seed, "holdout-eval");
    if (holdout && !holdout->empty())
        res.holdout_initial =
            evaluate_loss(*holdout, masks, schedule, model, batch, eval_seed, lambda);

    Rng rng(split_seed(seed, "train-loop"));
    std::vector<Eigen::VectorXd> sample_grads(batch, Eigen::VectorXd::Zero(np));
    for (int step = 1; step <= opt.steps; ++step) {
        const auto drawn = draw_batch(dataset, masks, schedule, batch, rng);

        std::vector<double> losses(batch, 0.0);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < batch; ++i) {
            sample_grads[i].setZero();
            const Eigen::VectorXd target =
                analytic_score_target(drawn[i].x_t, drawn[i].x0, drawn[i].t, schedule);
            losses[i] = model.loss_and_grad(drawn[i].x_t, drawn[i].z, drawn[i].t, target,
                                            lambda(drawn[i].t, schedule), sample_grads[i]);
        }

        // Fixed-order reduction keeps the update bitwise reproducible.
        double loss = 0.0;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
        for (int i = 0; i < batch; ++i) {
            loss += losses[i];
            grad += sample_grads[i];
        }
        loss /= batch;
        grad /= batch;

        if (!std::isfinite(loss))
            throw std::runtime_error("train: divergent loss at step " + std::to_string(step) +
                                     " (loss=" + std::to_string(loss) + ")");

        if (opt.clip_norm > 0.0) {
            const double gn = grad.norm();
            if (gn > opt.clip_norm) grad *= opt.clip_norm / gn;
        }

        // AdamW with decoupled weight decay.
        Eigen::VectorXd& theta = model.params();
        m = opt.beta1 * m + (1.0 - opt.beta1) * grad;
        v = opt.beta2 * v + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
        const double bc1 = 1.0 - std::pow(opt.beta1, step);
        const double bc2 = 1.0 - std::pow(opt.beta2, step);
        for (int i = 0; i < np; ++i) {
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= opt.lr * (mhat / (std::sqrt(vhat) + opt.eps) + opt.weight_decay * theta[i]);
        }
        res.theta_ema = opt.ema_decay * res.theta_ema + (1.0 - opt.ema_decay) * theta;

        res.loss_trace.emplace_back(step, loss);
    }

    res.theta = model.params();
    if (holdout && !holdout->empty())
        res.holdout_final =
            evaluate_loss(*holdout, masks, schedule, model, batch, eval_seed, lambda);
    return res;
}

} // namespace eitc
