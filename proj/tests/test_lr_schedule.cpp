#include <gtest/gtest.h>

#include "adaplus/lr_schedule.hpp"

using namespace adaplus;

TEST(LrSchedule, BeforeFirstMilestone) {
    const LrSchedule s{{150}, 0.1};
    EXPECT_EQ(lr_at(s, 0.01, 0), 0.01);
    EXPECT_EQ(lr_at(s, 0.01, 149), 0.01);
}

TEST(LrSchedule, DecaysAtMilestone) {
    const LrSchedule s{{150}, 0.1};
    EXPECT_NEAR(lr_at(s, 0.01, 150), 0.001, 1e-18);
    EXPECT_NEAR(lr_at(s, 0.01, 199), 0.001, 1e-18);
}

TEST(LrSchedule, TwoMilestones) {
    const LrSchedule s{{100, 145}, 0.1};
    EXPECT_EQ(lr_at(s, 1e-3, 99), 1e-3);
    EXPECT_NEAR(lr_at(s, 1e-3, 100), 1e-4, 1e-19);
    EXPECT_NEAR(lr_at(s, 1e-3, 146), 1e-5, 1e-20);
}

TEST(LrSchedule, EmptyScheduleIsConstant) {
    const LrSchedule s;
    for (std::uint64_t e : {0u, 1u, 1000u}) EXPECT_EQ(lr_at(s, 0.5, e), 0.5);
}

TEST(LrSchedule, MultiplicativeLaw) {
    const LrSchedule s{{2, 4, 6, 8}, 0.5};
    for (std::uint64_t e = 0; e < 10; ++e) {
        const int k = static_cast<int>(e / 2);
        EXPECT_DOUBLE_EQ(lr_at(s, 1.0, e), std::pow(0.5, k));
    }
}

TEST(LrSchedule, Validation) {
    EXPECT_NO_THROW((LrSchedule{{1, 2, 3}, 0.1}.validate()));
    EXPECT_THROW((LrSchedule{{3, 2}, 0.1}.validate()), OptimError);
    EXPECT_THROW((LrSchedule{{2, 2}, 0.1}.validate()), OptimError);
    EXPECT_THROW((LrSchedule{{0}, 0.1}.validate()), OptimError);
    EXPECT_THROW((LrSchedule{{5}, 0.0}.validate()), OptimError);
}
