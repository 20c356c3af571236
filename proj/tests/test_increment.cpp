#include "support.hpp"

#include <doctest.h>

using namespace hkvar;
using namespace hkvar::testing;

TEST_CASE("joint increment examples") {
    CHECK(joint_increment(product_oracle(2), Rect::unit(2)) == 1.0);
    CHECK(joint_increment(product_oracle(3), Rect::unit(3)) == 1.0);
    const auto kink = FuncSource::oracle(2, [](std::span<const double> x) { return std::abs(x[0] + x[1] - 1.0); });
    CHECK(joint_increment(kink, Rect::unit(2)) == 2.0);
    const auto sep = FuncSource::oracle(2, [](std::span<const double> x) { return std::exp(x[0]) + std::log1p(x[1]); });
    CHECK(std::abs(joint_increment(sep, Rect({0.1, 0.2}, {0.9, 0.7}))) <= 1e-15);
    const auto sq = FuncSource::oracle(1, [](std::span<const double> x) { return x[0] * x[0]; });
    CHECK(joint_increment_recursive(sq, Rect({1.0}, {3.0})) == 8.0);
    CHECK(joint_increment_recursive(product_oracle(3), Rect::unit(3)) == 1.0);
}

TEST_CASE("degenerate rectangles give exactly zero without evaluation") {
    int calls = 0;
    const auto f = FuncSource::oracle(2, [&calls](std::span<const double> x) {
        ++calls;
        return std::exp(x[0] * x[1]);
    });
    const double d = joint_increment(f, Rect({0.3, 0.0}, {0.3, 1.0}));
    CHECK(d == 0.0);
    CHECK_FALSE(std::signbit(d));
    CHECK(calls == 0);
    CHECK(joint_increment_recursive(f, Rect({0.0, 0.5}, {1.0, 0.5})) == 0.0);
}

TEST_CASE("non-finite corner values raise an evaluation error with the corner") {
    const auto f = FuncSource::oracle(1, [](std::span<const double> x) { return 1.0 / x[0]; });
    try {
        joint_increment(f, Rect({0.0}, {1.0}));
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.point() == Point{0.0});
    }
}

TEST_CASE("corner sum and recursion agree on random polynomials") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const double a = joint_increment(f, r);
        const double b = joint_increment_recursive(f, r);
        CHECK(close_rel(a, b, 1e-10, 1e-13));
    }
}

TEST_CASE("increments are additive over partitions") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const auto part = random_partition(r, gen);
        CompensatedSum s;
        for (const Rect& c : subrects(part)) s.add(joint_increment(f, c));
        CHECK(close_rel(s.value(), joint_increment(f, r), 1e-10, 1e-12));
    }
}

TEST_CASE("cell increments of a tabulated sample match direct increments") {
    std::mt19937_64 gen(13);
    const auto f = random_polynomial(3, gen);
    const Rect r = random_rect(3, gen);
    const auto part = random_partition(r, gen);
    const auto incs = cell_increments(f.tabulate(part));
    REQUIRE(incs.size() == part.cell_count());
    for (std::size_t c = 0; c < incs.size(); ++c)
        CHECK(close_rel(incs[c], joint_increment(f, part.cell(c)), 1e-10, 1e-13));
}

TEST_CASE("tilde transform") {
    const auto prod = product_oracle(2);
    const auto t = tilde_transform(prod, std::vector<double>{0.0, 0.0});
    CHECK(t(std::vector<double>{0.3, 0.7}) == doctest::Approx(0.21));

    std::mt19937_64 gen(14);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto f = random_polynomial(n, gen);
        const Rect r = random_rect(n, gen);
        const auto ft = tilde_transform(f, r.lo());
        CHECK(ft(r.lo()) == 0.0);
        Point x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = uniform(gen, r.lo()[i], r.hi()[i]);
        const Rect ax(r.lo(), x);
        CHECK(close_rel(joint_increment(ft, ax), joint_increment(f, ax), 1e-10, 1e-10));
    }
}

TEST_CASE("clamp extension holds values at the boundary") {
    const auto f = clamp_extension(product_oracle(2), Rect::unit(2));
    CHECK(f(std::vector<double>{2.0, 0.5}) == 0.5);
    CHECK(f(std::vector<double>{-1.0, 0.5}) == 0.0);
    CHECK(f(std::vector<double>{0.25, 0.5}) == 0.125);
}

TEST_CASE("sampled sources answer vertices only unless interpolation is chosen") {
    const auto part = GridPartition::uniform(Rect::unit(2), 2);
    const auto sample = product_oracle(2).tabulate(part);
    const auto exact = FuncSource::sampled(sample);
    CHECK(exact(std::vector<double>{0.5, 1.0}) == 0.5);
    CHECK_THROWS_AS(exact(std::vector<double>{0.25, 1.0}), DomainError);
    CHECK_THROWS_AS(exact(std::vector<double>{1.5, 1.0}), DomainError);
    const auto lin = FuncSource::sampled(sample, Interpolation::Multilinear);
    CHECK(lin(std::vector<double>{0.25, 1.0}) == doctest::Approx(0.25));
    const auto near = FuncSource::sampled(sample, Interpolation::Nearest);
    CHECK(near(std::vector<double>{0.4, 0.9}) == doctest::Approx(0.5));
    CHECK(joint_increment(exact, Rect::unit(2)) == 1.0);
}

TEST_CASE("oracles are deterministic under repeated evaluation") {
    for (const auto& z : zoo_default_instances()) {
        const Point m = z.entry.rect.midpoint();
        const double a = z.f(m), b = z.f(m);
        CHECK(a == b);
    }
}
