// Conditional score models. The evaluation contract is the score
// s_theta(x_t, z, t) together with reverse-mode parameter gradients of the
// score-matching residual. The convolutional denoiser parameterizes the score
// through a clean-measurement prediction (the same reparameterization used by
// preconditioned denoising networks): the network maps the stacked channels
// (x_t, masked values, mask bits) plus an additive sinusoidal time embedding
// to xhat0, and the score is -(x_t - sqrt(abar_t) xhat0) / (1 - abar_t).
#pragma once

#include "eitc/kernels.hpp"
#include "eitc/schedule.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace eitc {

/// Conditioning channels: observed values (zeros where unobserved) and the
/// mask bits, both flattened row-major to length d.
struct Condition {
    Eigen::VectorXd observed;
    Eigen::VectorXd mask;
};

class ScoreModel {
  public:
    virtual ~ScoreModel() = default;

    virtual int dim() const = 0;
    virtual Eigen::VectorXd& params() = 0;
    virtual const Eigen::VectorXd& params() const = 0;

    virtual Eigen::VectorXd score(const Eigen::VectorXd& x_t, const Condition& z, int t) const = 0;

    /// weight * ||s_theta(x_t, z, t) - target||^2 for one sample; the
    /// parameter gradient is accumulated into grad (same length as params).
    virtual double loss_and_grad(const Eigen::VectorXd& x_t, const Condition& z, int t,
                                 const Eigen::VectorXd& target, double weight,
                                 Eigen::VectorXd& grad) const = 0;
};

struct ConvDenoiserConfig {
    int n_side = 32;      // measurement table side N_B
    int base_width = 16;  // channels at full resolution; doubled per level
    int t_embed_dim = 32; // sinusoidal embedding size
};

/// Two-level convolutional encoder-decoder with additive skip connections.
class ConvDenoiser final : public ScoreModel {
  public:
    ConvDenoiser(const ConvDenoiserConfig& config, const NoiseSchedule& schedule,
                 std::uint64_t init_seed);

    int dim() const override { return cfg_.n_side * cfg_.n_side; }
    Eigen::VectorXd& params() override { return theta_; }
    const Eigen::VectorXd& params() const override { return theta_; }
    const ConvDenoiserConfig& config() const { return cfg_; }
    const NoiseSchedule& schedule() const { return schedule_; }
    int param_count() const { return int(theta_.size()); }

    /// Clean-measurement prediction xhat0(x_t, z, t).
    Eigen::VectorXd predict_clean(const Eigen::VectorXd& x_t, const Condition& z, int t) const;

    Eigen::VectorXd score(const Eigen::VectorXd& x_t, const Condition& z, int t) const override;

    double loss_and_grad(const Eigen::VectorXd& x_t, const Condition& z, int t,
                         const Eigen::VectorXd& target, double weight,
                         Eigen::VectorXd& grad) const override;

    /// Parallelize convolutions internally (used by single-chain sampling;
    /// training parallelizes over batch samples instead).
    void set_internal_parallelism(bool on) { parallel_ = on; }

  private:
    struct Workspace;
    void forward(const Eigen::VectorXd& x_t, const Condition& z, int t, Workspace& ws) const;
    Eigen::VectorXd time_embedding(int t) const;

    ConvDenoiserConfig cfg_;
    NoiseSchedule schedule_;
    Eigen::VectorXd theta_;
    bool parallel_ = false;

    // Parameter block offsets into theta_ (conv weights, conv biases, time
    // projection weights/biases per layer).
    struct Block {
        int w_off, w_len, b_off, b_len, tw_off, tw_len, tb_off, tb_len;
        int cin, cout;
    };
    Block conv_in_, enc1_, enc2_, dec2_, dec1_, out_;
};

} // namespace eitc
