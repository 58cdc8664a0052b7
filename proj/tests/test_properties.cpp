// Invariants of the kernel family checked over seeded random streams.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "adaplus/bench/selftest.hpp"
#include "adaplus/kernels.hpp"

using namespace adaplus;
using bench::RandomStream;

namespace {

std::vector<StepTranscript> run(Kernel k, const RandomStream& s, const HyperParams& hp) {
    RandomStream copy = s;
    copy.kernel = k;
    copy.hp = hp;
    return bench::run_kernel(copy);
}

::testing::AssertionResult identical(const std::vector<StepTranscript>& a, const std::vector<StepTranscript>& b) {
    if (a.size() != b.size()) return ::testing::AssertionFailure() << "length differs";
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].elements.size(); ++i) {
            const auto& x = a[k].elements[i];
            const auto& y = b[k].elements[i];
            if (x.m != y.m || x.second_moment != y.second_moment || x.mbar != y.mbar || x.mhat != y.mhat ||
                x.shat != y.shat || x.decay_applied != y.decay_applied || x.delta_theta != y.delta_theta ||
                x.theta_after != y.theta_after) {
                return ::testing::AssertionFailure() << "step " << k + 1 << " element " << i;
            }
        }
    }
    return ::testing::AssertionSuccess();
}

} // namespace

TEST(Reduction, AdaplusWithoutNesterovIsAdabelief) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = bench::make_random_stream(Kernel::adaplus, 100 + seed, 100);
        HyperParams plus = s.hp;
        plus.use_nesterov = false;
        plus.use_belief = true;
        plus.decoupled_decay = true;
        plus.weight_decay = 0.0;
        HyperParams belief = plus;
        belief.decoupled_decay = false;
        EXPECT_TRUE(identical(run(Kernel::adaplus, s, plus), run(Kernel::adabelief, s, belief))) << seed;
    }
}

TEST(Reduction, AdaplusWithoutNesterovOrBeliefIsAdamw) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = bench::make_random_stream(Kernel::adaplus, 200 + seed, 100);
        HyperParams plus = s.hp;
        plus.use_nesterov = false;
        plus.use_belief = false;
        plus.decoupled_decay = true;
        plus.eps_in_second_moment = false;
        EXPECT_TRUE(identical(run(Kernel::adaplus, s, plus), run(Kernel::adamw, s, plus))) << seed;
    }
}

TEST(Reduction, AdamwWithoutDecayIsAdam) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = bench::make_random_stream(Kernel::adamw, 300 + seed, 100);
        HyperParams hp = s.hp;
        hp.weight_decay = 0.0;
        EXPECT_TRUE(identical(run(Kernel::adamw, s, hp), run(Kernel::adam, s, hp))) << seed;
    }
}

TEST(Reduction, NadamWithoutNesterovIsAdam) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = bench::make_random_stream(Kernel::nadam, 400 + seed, 100);
        HyperParams hp = s.hp;
        hp.use_nesterov = false;
        EXPECT_TRUE(identical(run(Kernel::nadam, s, hp), run(Kernel::adam, s, hp))) << seed;
    }
}

TEST(ClosedForm, ConstantGradientMoments) {
    const double beta1 = 0.9;
    for (double c : {1.0, -3.5, 1e-4}) {
        OptimizerState state(1);
        ParamVector params{0.0};
        HyperParams hp;
        hp.weight_decay = 0.0;
        const std::vector<double> g{c};
        for (int t = 1; t <= 1000; ++t) {
            const auto e = adaplus_step(state, params, g, hp, 1e-3).elements[0];
            const double bt = std::pow(beta1, t);
            ASSERT_LE(bench::relative_error(e.m, (1.0 - bt) * c), 1e-12) << t;
            ASSERT_LE(bench::relative_error(e.mhat, c * (1.0 - bt * beta1) / (1.0 - bt)), 1e-12) << t;
            // g - m_t is a cancellation; it is representable to 1e-12 only
            // while beta1^t stays well above the unit roundoff.
            if (t <= 50) {
                ASSERT_LE(bench::relative_error(c - e.m, bt * c), 1e-12) << t;
            }
        }
    }
}

TEST(StepsizeComparison, BeliefBeatsSecondMomentOnConstantStream) {
    for (double c : {10.0, -0.5, 1e3}) {
        HyperParams hp;
        hp.weight_decay = 0.0;
        OptimizerState state(1);
        ParamVector params{0.0};
        const std::vector<double> g{c};
        double v = 0.0;
        for (int t = 1; t <= 200; ++t) {
            const auto e = adaplus_step(state, params, g, hp, 1e-3).elements[0];
            v = hp.beta2 * v + (1.0 - hp.beta2) * (c * c);
            if (t < 10) continue;
            const double vhat = v / (1.0 - std::pow(hp.beta2, t));
            ASSERT_LT(e.second_moment, v) << t;
            const double with_v = 1e-3 * e.mhat / (std::sqrt(vhat) + hp.eps);
            ASSERT_GT(std::abs(e.delta_theta), std::abs(with_v)) << t;
        }
    }
}

TEST(ScaleInvariance, GradientScaleLeavesStepsUnchanged) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = bench::make_random_stream(Kernel::adaplus, 500 + seed, 100);
        s.hp = HyperParams{};
        s.hp.eps = 0.0;
        const auto base = bench::run_kernel(s);
        for (double scale : {1e-3, 1e3}) {
            RandomStream scaled = s;
            for (auto& g : scaled.grads) {
                for (double& x : g) x *= scale;
            }
            const auto got = bench::run_kernel(scaled);
            for (std::size_t k = 0; k < base.size(); ++k) {
                for (std::size_t i = 0; i < base[k].elements.size(); ++i) {
                    ASSERT_LE(bench::relative_error(base[k].elements[i].delta_theta, got[k].elements[i].delta_theta),
                              1e-10);
                }
            }
        }
    }
}

TEST(DecayLaw, ZeroGradientShrinksGeometrically) {
    for (Kernel k : {Kernel::adaplus, Kernel::adamw}) {
        OptimizerState state(1);
        ParamVector params{2.5};
        const std::vector<double> g{0.0};
        HyperParams hp = HyperParams::defaults(k);
        for (int t = 0; t < 100; ++t) step(k, state, params, g, hp, 1e-3);
        EXPECT_LE(bench::relative_error(params[0] / 2.5, std::pow(1.0 - 1e-5, 100)), 1e-14) << to_string(k);
    }
}

TEST(Sign, PositiveGradientsNeverIncreaseTheta) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    for (Kernel k : all_kernels) {
        HyperParams hp = HyperParams::defaults(k);
        hp.weight_decay = 0.0;
        OptimizerState state(1);
        ParamVector params{0.0};
        for (int t = 0; t < 300; ++t) {
            const std::vector<double> g{pos(rng)};
            ASSERT_LE(step(k, state, params, g, hp, hp.lr).elements[0].delta_theta, 0.0) << to_string(k);
        }
    }
}

TEST(Determinism, IdenticalStreamsGiveIdenticalTrajectories) {
    for (Kernel k : all_kernels) {
        const auto s = bench::make_random_stream(k, 42, 150);
        EXPECT_TRUE(identical(bench::run_kernel(s), bench::run_kernel(s))) << to_string(k);
    }
}
