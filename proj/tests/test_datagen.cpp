#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace trajseek;

namespace {

gen_profile small(profile_kind kind, std::uint64_t seed = 3) {
    auto p = gen_profile::defaults(kind);
    p.trajectories = kind == profile_kind::exp ? 400 : 60;
    p.seed = seed;
    return p;
}

std::string csv(const segment_store& s) {
    std::ostringstream os;
    write_segments(os, s.segments());
    return os.str();
}

} // namespace

TEST(datagen, profile_defaults_match_dataset_sizes) {
    const auto u = gen_profile::defaults(profile_kind::uniform);
    EXPECT_EQ(u.trajectories * (u.timesteps - 1), 2500u * 399u);
    EXPECT_EQ(u.start_min, 0);
    EXPECT_EQ(u.start_max, 100);
    for (auto k : {profile_kind::normal, profile_kind::normal5}) {
        const auto n = gen_profile::defaults(k);
        EXPECT_EQ(n.trajectories * (n.timesteps - 1), 1000000u);
    }
    const auto n = gen_profile::defaults(profile_kind::normal);
    EXPECT_EQ(n.start_mean, 200);
    EXPECT_EQ(n.start_stddev, 200);
    const auto e = gen_profile::defaults(profile_kind::exp);
    EXPECT_EQ(e.trajectories, 10000u);
    EXPECT_EQ(e.start_max, 20);
    EXPECT_DOUBLE_EQ(e.exp_rate, 1.0 / 70.0);
}

TEST(datagen, deterministic_per_seed) {
    for (auto k : {profile_kind::uniform, profile_kind::normal, profile_kind::normal5, profile_kind::exp}) {
        EXPECT_EQ(csv(generate(small(k, 9))), csv(generate(small(k, 9)))) << to_string(k);
        EXPECT_NE(csv(generate(small(k, 9))), csv(generate(small(k, 10)))) << to_string(k);
    }
}

TEST(datagen, fixed_length_profiles) {
    for (auto k : {profile_kind::uniform, profile_kind::normal, profile_kind::normal5}) {
        const auto p = small(k);
        const auto trajs = generate_trajectories(p);
        ASSERT_EQ(trajs.size(), p.trajectories);
        for (const auto& t : trajs) {
            ASSERT_EQ(t.size(), p.timesteps - 1);
            EXPECT_GE(t.front().start.t, p.start_min);
            EXPECT_LE(t.front().start.t, p.start_max);
            for (std::size_t i = 0; i < t.size(); ++i) {
                EXPECT_EQ(t[i].seg_id, i);
                EXPECT_NEAR(t[i].duration(), 1.0, 1e-9);
                if (i > 0) {
                    EXPECT_EQ(t[i].start, t[i - 1].end);
                }
            }
        }
    }
}

TEST(datagen, exp_lengths_follow_truncated_exponential) {
    auto p = gen_profile::defaults(profile_kind::exp);
    p.trajectories = 4000;
    p.seed = 5;
    const auto trajs = generate_trajectories(p);
    double mean_points = 0;
    for (const auto& t : trajs) {
        EXPECT_GE(t.size() + 1, p.exp_min_steps);
        EXPECT_LE(t.size() + 1, p.exp_max_steps);
        mean_points += static_cast<double>(t.size() + 1) / static_cast<double>(trajs.size());
    }
    const double expected = truncated_exponential_mean(p.exp_rate, 2, 1000);
    EXPECT_NEAR(mean_points, expected, 0.05 * expected);
}

TEST(datagen, truncated_exponential_mean_limits) {
    // Without truncation the mean is 1 / rate.
    EXPECT_NEAR(truncated_exponential_mean(0.5, 0, 1e3), 2.0, 1e-9);
    EXPECT_NEAR(truncated_exponential_mean(1e-9, 0, 10), 5.0, 1e-3);
}

TEST(datagen, normal_starts_are_centred) {
    auto p = gen_profile::defaults(profile_kind::normal);
    p.trajectories = 3000;
    p.timesteps = 2;
    p.start_mean = 200;
    p.start_stddev = 40;
    const auto s = generate(p);
    double mean = 0;
    for (const auto& seg : s)
        mean += seg.start.t / static_cast<double>(s.size());
    EXPECT_NEAR(mean, 200, 3);
}

TEST(datagen, normal5_has_several_modes) {
    auto p = gen_profile::defaults(profile_kind::normal5);
    p.trajectories = 5000;
    p.timesteps = 2;
    const auto s = generate(p);
    std::vector<std::size_t> hist(10, 0);
    for (const auto& seg : s)
        ++hist[std::min<std::size_t>(static_cast<std::size_t>(seg.start.t / 40.0), 9)];
    // Component means sit at the centres of the five 80-wide fifths.
    for (std::size_t k = 0; k < 5; ++k)
        EXPECT_GT(hist[2 * k] + hist[2 * k + 1], 800u) << k;
}

TEST(datagen, sample_queries) {
    const auto p = small(profile_kind::uniform);
    const auto q = sample_queries(p, 10, 77);
    EXPECT_EQ(q.size(), 10 * (p.timesteps - 1));
    std::set<trajectory_id> ids;
    for (const auto& s : q)
        ids.insert(s.traj_id);
    EXPECT_EQ(ids.size(), 10u);
    EXPECT_EQ(csv(q), csv(sample_queries(p, 10, 77)));
    EXPECT_THROW(sample_queries(p, p.trajectories + 1, 1), std::domain_error);
    EXPECT_TRUE(sample_queries(p, 0, 1).empty());
}

TEST(datagen, rejects_invalid_profiles) {
    auto p = gen_profile::defaults(profile_kind::uniform);
    p.timesteps = 1;
    EXPECT_THROW(generate(p), std::domain_error);
    p = gen_profile::defaults(profile_kind::exp);
    p.exp_rate = 0;
    EXPECT_THROW(generate(p), std::domain_error);
    p = gen_profile::defaults(profile_kind::uniform);
    p.start_max = -1;
    EXPECT_THROW(generate(p), std::domain_error);
    EXPECT_EQ(parse_profile("normal5"), profile_kind::normal5);
    EXPECT_THROW(parse_profile("gauss"), std::invalid_argument);
}
