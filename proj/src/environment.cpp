#include "opdmin/environment.hpp"

#include <algorithm>
#include <cmath>

#include "opdmin/errors.hpp"
#include "opdmin/kernels.hpp"

namespace opdmin {

Environment::Environment(OpinionVector s, double sigma, std::uint64_t noise_seed)
    : s_(std::move(s)), sigma_(sigma), rng_(noise_seed) {
    if (sigma_ < 0.0) throw ConfigError("environment: sigma must be nonnegative");
    double norm2 = kernels::dot(s_.data(), s_.data(), s_.size());
    if (norm2 == 0.0) throw ConfigError("environment: innate opinions must not be all zero");
    // entries live in [-1, 1] up to the sampler's clip overshoot
    if (norm2 > 1.1 * static_cast<double>(s_.size()))
        throw ConfigError("environment: |s|^2 exceeds the node count");
}

double Environment::true_loss(const Arm& arm) const {
    if (arm.forest.n() != n()) throw DimensionMismatch("true_loss: arm dimension differs");
    return kernels::quad_form(arm.forest.data(), static_cast<std::size_t>(n()), s_.data());
}

double Environment::observe(const Arm& arm) {
    double y = true_loss(arm);
    if (sigma_ > 0.0) y += sigma_ * rng_.normal();
    else rng_.normal();  // keep the stream position independent of sigma
    return y;
}

std::pair<int, double> Environment::best_arm(const ArmSet& arms) const {
    if (arms.size() < 1) throw ConfigError("best_arm: empty arm set");
    int best = 0;
    double best_value = true_loss(arms.arms[0]);
    for (int i = 1; i < arms.size(); ++i) {
        double v = true_loss(arms.arms[i]);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    return {best, best_value};
}

void Environment::reseed_noise(std::uint64_t noise_seed) { rng_ = Rng(noise_seed); }

void RegretTrace::record(int chosen, const Environment& env, const ArmSet& arms) {
    if (!primed_) {
        true_losses_.resize(arms.size());
        for (int i = 0; i < arms.size(); ++i) true_losses_[i] = env.true_loss(arms.arms[i]);
        best_value_ = *std::min_element(true_losses_.begin(), true_losses_.end());
        primed_ = true;
    }
    double r = true_losses_[chosen] - best_value_;
    chosen_.push_back(chosen);
    instant_.push_back(r);
    cumulative_.push_back((cumulative_.empty() ? 0.0 : cumulative_.back()) + r);
}

double RegretTrace::regret_at(long t) const {
    if (t < 1 || cumulative_.empty()) return 0.0;
    std::size_t idx = static_cast<std::size_t>(std::min<long>(t, rounds())) - 1;
    return cumulative_[idx];
}

}  // namespace opdmin
