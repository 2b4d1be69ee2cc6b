#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <doctest.h>

#include "kmncs/datasets.hpp"
#include "kmncs/error.hpp"
#include "kmncs/rng.hpp"

using namespace kmncs;

namespace {

std::size_t count(const Dataset& d, int label) { return std::count(d.labels.begin(), d.labels.end(), label); }

}  // namespace

TEST_CASE("moons template") {
    const auto d = make_moons(4, 0.0, 1);
    REQUIRE(d.size() == 4);
    const std::vector<Point> want{{1, 0}, {-1, 0}, {0, 0.5}, {2, 0.5}};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(d.points[i][0] == doctest::Approx(want[i][0]).epsilon(1e-15).scale(1));
        CHECK(d.points[i][1] == doctest::Approx(want[i][1]).epsilon(1e-15).scale(1));
    }
    CHECK(d.labels == std::vector<int>{-1, -1, 1, 1});

    const auto big = make_moons(201, 0.0, 1);
    CHECK(count(big, -1) == 101);
    CHECK(count(big, 1) == 100);
    for (std::size_t i = 0; i < big.size(); ++i)
        if (big.labels[i] == -1) CHECK(std::abs(std::hypot(big.points[i][0], big.points[i][1]) - 1.0) <= 1e-12);
    CHECK(big.meta.generator == "moons");
    CHECK(big.meta.rng == SplitMix64::kAlgorithmId);
    CHECK_THROWS_AS(make_moons(1, 0.0, 1), Error);
}

TEST_CASE("moons noise variance") {
    const auto clean = make_moons(200, 0.0, 0);
    double sx = 0.0, sy = 0.0;
    std::size_t m = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto d = make_moons(200, 0.4, seed);
        for (std::size_t i = 0; i < d.size(); ++i) {
            sx += std::pow(d.points[i][0] - clean.points[i][0], 2);
            sy += std::pow(d.points[i][1] - clean.points[i][1], 2);
            ++m;
        }
    }
    CHECK(sx / m == doctest::Approx(0.16).epsilon(0.25));
    CHECK(sy / m == doctest::Approx(0.16).epsilon(0.25));
}

TEST_CASE("circles template") {
    const auto d = make_circles(200, 0.0, 0.5, 3);
    CHECK(count(d, -1) == 100);
    CHECK(count(d, 1) == 100);
    const double cut = 0.75;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = std::hypot(d.points[i][0], d.points[i][1]);
        if (d.labels[i] == 1) {
            CHECK(std::abs(r - 0.5) <= 1e-12);
            CHECK(r < cut);
        } else {
            CHECK(r > cut);
        }
    }
    CHECK(d.meta.factor == 0.5);
    CHECK_THROWS_AS(make_circles(10, 0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(make_circles(10, 0.0, 0.0, 1), Error);
    CHECK_THROWS_AS(make_circles(0, 0.0, 0.5, 1), Error);
}

TEST_CASE("circles radial noise") {
    double s = 0.0;
    std::size_t m = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto d = make_circles(200, 0.1, 0.5, seed);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d.labels[i] != 1) continue;
            s += std::pow(std::hypot(d.points[i][0], d.points[i][1]) - 0.5, 2);
            ++m;
        }
    }
    CHECK(std::sqrt(s / m) == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("determinism") {
    const auto a = make_moons(100, 0.3, 42), b = make_moons(100, 0.3, 42), c = make_moons(100, 0.3, 43);
    CHECK(a.points == b.points);
    CHECK(a.labels == b.labels);
    CHECK(a.points != c.points);
    const auto f1 = flip_labels(a, 0.3, 9), f2 = flip_labels(a, 0.3, 9);
    CHECK(f1.labels == f2.labels);
}

TEST_CASE("label flipping") {
    const auto d = make_circles(10000, 0.1, 0.5, 1);
    CHECK(flip_labels(d, 0.0, 5).labels == d.labels);
    const auto all = flip_labels(d, 1.0, 5);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(all.labels[i] == -d.labels[i]);
    const auto some = flip_labels(d, 0.2, 5);
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < d.size(); ++i) flipped += some.labels[i] != d.labels[i];
    CHECK(double(flipped) / d.size() == doctest::Approx(0.2).epsilon(0.05));
    CHECK(std::abs(double(flipped) / d.size() - 0.2) <= 0.01);
    CHECK(some.meta.flip_y == 0.2);
    CHECK(some.meta.flip_seed == 5u);
    CHECK(flip_labels(some, 0.2, 5).labels == d.labels);
}

TEST_CASE("split") {
    const auto d = make_moons(10, 0.1, 1);
    const auto [train, test] = split(d, 0.6, 4);
    CHECK(train.size() == 6);
    CHECK(test.size() == 4);
    std::multiset<std::pair<Point, int>> all, parts;
    for (std::size_t i = 0; i < d.size(); ++i) all.insert({d.points[i], d.labels[i]});
    for (const auto* part : {&train, &test})
        for (std::size_t i = 0; i < part->size(); ++i) parts.insert({part->points[i], part->labels[i]});
    CHECK(all == parts);
    const auto [train2, test2] = split(d, 0.6, 4);
    CHECK(train2.points == train.points);
    CHECK(test2.labels == test.labels);
    const auto tiny = make_moons(2, 0.0, 1);
    CHECK_THROWS_AS(split(tiny, 0.5, 1), Error);
}

TEST_CASE("stratified folds") {
    const auto d = make_moons(100, 0.2, 1);
    const auto one = stratified_folds(d, 1, 3);
    CHECK(one.members(0).size() == 100);
    CHECK(one.complement(0).empty());

    const auto five = stratified_folds(d, 5, 3);
    for (std::size_t f = 0; f < 5; ++f) {
        std::map<int, int> per;
        for (std::size_t i : five.members(f)) ++per[d.labels[i]];
        CHECK(per[-1] == 10);
        CHECK(per[1] == 10);
        CHECK(five.members(f).size() + five.complement(f).size() == 100);
    }
    CHECK(stratified_folds(d, 5, 3).assignments == five.assignments);

    const auto noisy = flip_labels(make_circles(200, 0.1, 0.5, 2), 0.2, 8);
    const double pos = double(count(noisy, 1)) / noisy.size();
    const auto plan = stratified_folds(noisy, 5, 4);
    for (std::size_t f = 0; f < 5; ++f) {
        const auto mem = plan.members(f);
        std::size_t p = 0;
        for (std::size_t i : mem) p += noisy.labels[i] == 1;
        CHECK(std::abs(double(p) - pos * mem.size()) <= 1.0);
    }
    CHECK_THROWS_AS(stratified_folds(make_moons(6, 0.0, 1), 4, 1), Error);
}

TEST_CASE("csv round-trip") {
    const auto d = flip_labels(make_circles(30, 0.2, 0.4, 77), 0.1, 3);
    std::stringstream buf;
    write_dataset_csv(d, buf);
    const std::string text = buf.str();
    CHECK(text.find("# generator=circles") != std::string::npos);
    CHECK(text.find("# rng=splitmix64") != std::string::npos);
    CHECK(text.find("\nx1,x2,label\n") != std::string::npos);
    const auto back = read_dataset_csv(buf);
    CHECK(back.points == d.points);
    CHECK(back.labels == d.labels);
    CHECK(back.meta.seed == d.meta.seed);
    CHECK(back.meta.factor == d.meta.factor);
    CHECK(back.meta.flip_y == d.meta.flip_y);

    std::istringstream bad("x1,x2,label\n0.1,0.2,3\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), Error);
}
