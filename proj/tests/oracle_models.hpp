// Test-only score models: the exact marginal score of a unit-covariance
// Gaussian target under the forward process, and a mean-only linear model
// whose population score-matching minimizer is the target mean. These stay
// independent of the production network so sampler and trainer can be checked
// against closed forms.
#pragma once

#include "eitc/denoiser.hpp"
#include "eitc/schedule.hpp"

#include <Eigen/Dense>

namespace eitc::testing {

/// Target N(mu, I): the noised marginal is N(sqrt(abar_t) mu, I), so the true
/// score is -(x - sqrt(abar_t) mu).
class GaussianExactScore final : public ScoreModel {
  public:
    GaussianExactScore(Eigen::VectorXd mu, NoiseSchedule schedule)
        : mu_(std::move(mu)), schedule_(std::move(schedule)) {}

    int dim() const override { return int(mu_.size()); }
    Eigen::VectorXd& params() override { return mu_; }
    const Eigen::VectorXd& params() const override { return mu_; }

    Eigen::VectorXd score(const Eigen::VectorXd& x_t, const Condition&, int t) const override {
        return -(x_t - std::sqrt(schedule_.abar(t)) * mu_);
    }

    double loss_and_grad(const Eigen::VectorXd& x_t, const Condition& z, int t,
                         const Eigen::VectorXd& target, double weight,
                         Eigen::VectorXd& grad) const override {
        const Eigen::VectorXd diff = score(x_t, z, t) - target;
        grad += weight * 2.0 * std::sqrt(schedule_.abar(t)) * diff;
        return weight * diff.squaredNorm();
    }

  private:
    Eigen::VectorXd mu_;
    NoiseSchedule schedule_;
};

/// Mean-parameterized linear score s_theta(x, t) = -(x - sqrt(abar_t) theta).
/// Under the score-matching objective its population minimizer is theta = mu
/// for data x0 ~ N(mu, I).
class LinearMeanScore final : public ScoreModel {
  public:
    LinearMeanScore(int d, NoiseSchedule schedule)
        : theta_(Eigen::VectorXd::Zero(d)), schedule_(std::move(schedule)) {}

    int dim() const override { return int(theta_.size()); }
    Eigen::VectorXd& params() override { return theta_; }
    const Eigen::VectorXd& params() const override { return theta_; }

    Eigen::VectorXd score(const Eigen::VectorXd& x_t, const Condition&, int t) const override {
        return -(x_t - std::sqrt(schedule_.abar(t)) * theta_);
    }

    double loss_and_grad(const Eigen::VectorXd& x_t, const Condition& z, int t,
                         const Eigen::VectorXd& target, double weight,
                         Eigen::VectorXd& grad) const override {
        const Eigen::VectorXd diff = score(x_t, z, t) - target;
        grad += weight * 2.0 * std::sqrt(schedule_.abar(t)) * diff;
        return weight * diff.squaredNorm();
    }

  private:
    Eigen::VectorXd theta_;
    NoiseSchedule schedule_;
};

} // namespace eitc::testing
