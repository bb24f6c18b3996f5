#pragma once

#include <cstdint>
#include <vector>

#include "opdmin/arms.hpp"
#include "opdmin/opinion.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

// Hidden ground truth: innate opinions s (so Theta* = s s', never formed
// explicitly) plus a seeded Gaussian noise stream for the loss oracle.
class Environment {
public:
    Environment(OpinionVector s, double sigma, std::uint64_t noise_seed);

    const OpinionVector& opinions() const { return s_; }
    double sigma() const { return sigma_; }
    int n() const { return static_cast<int>(s_.size()); }

    // f(X) = s' X s, noiseless.
    double true_loss(const Arm& arm) const;

    // Y = f(X) + eta, eta ~ N(0, sigma^2). Advances the noise stream.
    double observe(const Arm& arm);

    // Exhaustive scan; ties go to the lowest index.
    std::pair<int, double> best_arm(const ArmSet& arms) const;

    // Restarts the noise stream, e.g. one fresh stream per algorithm run.
    void reseed_noise(std::uint64_t noise_seed);

private:
    OpinionVector s_;
    double sigma_;
    Rng rng_;
};

// Per-round regret bookkeeping. Regret is always computed against noiseless
// losses; the noisy observations only drive the learner.
class RegretTrace {
public:
    void record(int chosen, const Environment& env, const ArmSet& arms);

    const std::vector<int>& chosen() const { return chosen_; }
    const std::vector<double>& instants() const { return instant_; }
    const std::vector<double>& cumulative() const { return cumulative_; }

    double final_regret() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    double regret_at(long t) const;  // cumulative regret after t rounds, t >= 1
    long rounds() const { return static_cast<long>(instant_.size()); }

    double stage1_seconds = 0.0;
    double stage2_seconds = 0.0;
    double total_seconds = 0.0;

private:
    std::vector<int> chosen_;
    std::vector<double> instant_;
    std::vector<double> cumulative_;
    std::vector<double> true_losses_;  // cached per arm set
    double best_value_ = 0.0;
    bool primed_ = false;
};

}  // namespace opdmin
