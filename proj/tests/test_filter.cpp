#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ctree/errors.hpp"
#include "ctree/filter.hpp"

using namespace ctree;

namespace {

AugmentedPoint ap(Instant ts, double accuracy, std::vector<std::string> ids) {
    AugmentedPoint p;
    p.point.timestamp = ts;
    p.point.accuracy = accuracy;
    p.element_ids = std::move(ids);
    std::sort(p.element_ids.begin(), p.element_ids.end());
    return p;
}

// Straight-line transcription of the scoring formula, one element at a
// time, independent of the production accumulation order.
double naive_score(const BufferWindow& w, const std::string& id, double delta) {
    const Instant center = w.points[w.index].point.timestamp;
    double inner = 0.0;
    int listings = 0;
    for (const auto& p : w.points) {
        if (std::find(p.element_ids.begin(), p.element_ids.end(), id) ==
            p.element_ids.end())
            continue;
        const double dist = std::abs(static_cast<double>(p.point.timestamp - center));
        inner += (1.0 / p.point.accuracy) * (1.0 - dist / delta);
        ++listings;
    }
    return inner * listings;
}

std::vector<AugmentedPoint> random_window(std::mt19937& rng, int max_points) {
    std::uniform_int_distribution<int> npts(1, max_points), nids(0, 4), which(0, 5);
    std::uniform_real_distribution<double> acc(1.0, 60.0);
    std::uniform_int_distribution<Instant> gap(10, 400);
    std::vector<AugmentedPoint> w;
    Instant ts = 1000;
    const int n = npts(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> ids;
        for (int k = nids(rng); k-- > 0;) ids.push_back("e" + std::to_string(which(rng)));
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        w.push_back(ap(ts, acc(rng), std::move(ids)));
        ts += gap(rng);
    }
    return w;
}

}  // namespace

TEST_CASE("score worked examples") {
    const double delta = 1200.0;
    SUBCASE("single point listing one element") {
        const std::vector<AugmentedPoint> w{ap(0, 10.0, {"e"})};
        const auto s = score_elements({w, 0}, delta);
        CHECK(s.at("e") == doctest::Approx(0.1));
    }
    SUBCASE("two listings multiply by the count") {
        // (1/10)(1-0) + (1/20)(1-0.5) = 0.125; times |P_e| = 2 -> 0.25.
        const std::vector<AugmentedPoint> w{ap(0, 10.0, {"e"}), ap(600, 20.0, {"e"})};
        const auto s = score_elements({w, 0}, delta);
        CHECK(s.at("e") == doctest::Approx(0.25));
    }
    SUBCASE("a listing exactly delta away contributes nothing") {
        const std::vector<AugmentedPoint> w{ap(0, 10.0, {}), ap(1200, 10.0, {"e"})};
        const auto s = score_elements({w, 0}, delta);
        CHECK(s.at("e") == doctest::Approx(0.0));
    }
}

TEST_CASE("score matches the naive transcription on random windows") {
    std::mt19937 rng(321);
    for (int trial = 0; trial < 500; ++trial) {
        const auto w = random_window(rng, 20);
        std::uniform_int_distribution<size_t> pick(0, w.size() - 1);
        const BufferWindow win{w, pick(rng)};
        const auto scores = score_elements(win, 1200.0);
        for (const auto& [id, s] : scores)
            CHECK(s == doctest::Approx(naive_score(win, id, 1200.0)).epsilon(1e-9));
    }
}

TEST_CASE("normalise maps the max to 1 and rejects all-zero") {
    const auto norm = normalise_scores({{"a", 2.0}, {"b", 1.0}});
    CHECK(norm.at("a") == doctest::Approx(1.0));
    CHECK(norm.at("b") == doctest::Approx(0.5));
    CHECK_THROWS_AS(normalise_scores({{"a", 0.0}}), AllZero);
    CHECK_THROWS_AS(normalise_scores({}), AllZero);
}

TEST_CASE("selection threshold is strict") {
    const std::map<std::string, double> norm{{"a", 1.0}, {"b", 0.8}, {"c", 0.81}};
    CHECK(select_elements(norm, 0.8) == std::set<std::string>{"a", "c"});
    CHECK(select_elements(norm, 1.0).empty());
    CHECK(select_elements(norm, 0.0) == std::set<std::string>{"a", "b", "c"});
}

TEST_CASE("filter_trajectory emits interior points in order") {
    // 11 points a minute apart, delta 120: two leading context points,
    // then emission until the trailing edge cannot be filled.
    std::vector<AugmentedPoint> aug;
    for (int i = 0; i < 11; ++i) aug.push_back(ap(i * 60, 10.0, {"e"}));
    const auto out = filter_trajectory(aug, {.delta = 120.0, .threshold = 0.8});
    REQUIRE(!out.empty());
    CHECK(out.size() < aug.size());
    for (size_t i = 0; i + 1 < out.size(); ++i)
        CHECK(out[i].point.timestamp < out[i + 1].point.timestamp);
    // The sole persistent element survives at every emitted point.
    for (const auto& p : out) CHECK(p.element_ids == std::vector<std::string>{"e"});
}

TEST_CASE("edge windows emit every point exactly once") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto aug = random_window(rng, 30);
        const auto out =
            filter_trajectory(aug, {.delta = 600.0, .threshold = 0.8, .edge_windows = true});
        REQUIRE(out.size() == aug.size());
        for (size_t i = 0; i < out.size(); ++i)
            CHECK(out[i].point.timestamp == aug[i].point.timestamp);
    }
}

TEST_CASE("filtered ids come from the input vocabulary") {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto aug = random_window(rng, 30);
        std::set<std::string> vocab;
        for (const auto& p : aug) vocab.insert(p.element_ids.begin(), p.element_ids.end());
        for (const auto& p : filter_trajectory(aug, {.delta = 600.0, .threshold = 0.5}))
            for (const auto& id : p.element_ids) CHECK(vocab.count(id) == 1);
    }
}

TEST_CASE("filter is deterministic") {
    std::mt19937 rng(8);
    const auto aug = random_window(rng, 40);
    const FilterParams params{.delta = 900.0, .threshold = 0.7};
    const auto a = filter_trajectory(aug, params);
    const auto b = filter_trajectory(aug, params);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].point.timestamp == b[i].point.timestamp);
        CHECK(a[i].element_ids == b[i].element_ids);
    }
}

TEST_CASE("windows with no listed elements emit the point bare") {
    std::vector<AugmentedPoint> aug;
    for (int i = 0; i < 10; ++i) aug.push_back(ap(i * 60, 10.0, {}));
    const auto out = filter_trajectory(aug, {.delta = 120.0, .threshold = 0.8});
    REQUIRE(!out.empty());
    for (const auto& p : out) CHECK(p.element_ids.empty());
}

TEST_CASE("raising the threshold never adds elements") {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto aug = random_window(rng, 30);
        const auto low = filter_trajectory(aug, {.delta = 600.0, .threshold = 0.3});
        const auto high = filter_trajectory(aug, {.delta = 600.0, .threshold = 0.9});
        REQUIRE(low.size() == high.size());
        for (size_t i = 0; i < low.size(); ++i)
            CHECK(std::includes(low[i].element_ids.begin(), low[i].element_ids.end(),
                                high[i].element_ids.begin(), high[i].element_ids.end()));
    }
}
