#include "support.hpp"

#include <doctest.h>

#include <numeric>

using namespace hkvar;

TEST_CASE("Rect validates its corners") {
    CHECK_THROWS_AS(Rect({0.0}, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(Rect({1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(Rect({}, {}), DomainError);
    CHECK_NOTHROW(Rect({0.5}, {0.5}));
    const Rect r({0.0, 1.0}, {2.0, 4.0});
    CHECK(r.dimension() == 2);
    CHECK(r.volume() == doctest::Approx(6.0));
    CHECK(r.min_side() == 2.0);
    CHECK_FALSE(r.is_degenerate());
    CHECK(Rect({0.0, 1.0}, {0.0, 2.0}).is_degenerate());
    CHECK(r.contains(std::vector<double>{1.0, 4.0}));
    CHECK_FALSE(r.contains(std::vector<double>{2.5, 2.0}));
}

TEST_CASE("corners of a one-dimensional interval") {
    const auto cs = corners(Rect({0.0}, {2.0}));
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].mask.sign == -1);
    CHECK(cs[0].point == Point{0.0});
    CHECK(cs[1].mask.sign == 1);
    CHECK(cs[1].point == Point{2.0});
}

TEST_CASE("corners of the unit square follow binary mask order") {
    const auto cs = corners(Rect::unit(2));
    REQUIRE(cs.size() == 4);
    const std::vector<int> signs = {1, -1, -1, 1};
    const std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(cs[k].mask.bits == k);
        CHECK(cs[k].mask.sign == signs[k]);
        CHECK(cs[k].point == pts[k]);
    }
}

TEST_CASE("corner signs sum to zero and masks are distinct") {
    for (std::size_t n = 1; n <= 8; ++n) {
        const auto cs = corners(Rect::unit(n));
        CHECK(cs.size() == (std::size_t{1} << n));
        int total = 0;
        for (const auto& c : cs) {
            total += c.mask.sign;
            CHECK(c.mask.sign == corner_sign(n, c.mask.bits));
        }
        CHECK(total == 0);
    }
}

TEST_CASE("corners refuse dimensions above the limit") {
    CHECK_THROWS_AS(corners(Rect::unit(kMaxDimension + 1)), DomainError);
}

TEST_CASE("refine inserts coordinates") {
    const auto p = GridPartition::identity(Rect::unit(2));
    const auto q = refine(p, std::vector<double>{0.5, 0.5});
    CHECK(q.axis(0) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(q.axis(1) == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(refine(q, std::vector<double>{0.5, 0.5}) == q);
    const auto r = refine(q, std::vector<double>{0.25, 0.75});
    CHECK(r.axis(0) == std::vector<double>{0.0, 0.25, 0.5, 1.0});
    CHECK(r.axis(1) == std::vector<double>{0.0, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(refine(q, std::vector<double>{1.5, 0.5}), DomainError);
}

TEST_CASE("subrects tile the rectangle") {
    const auto p = GridPartition::uniform(Rect::unit(2), 2);
    std::size_t count = 0;
    for (const Rect& c : subrects(p)) {
        CHECK(c.side(0) == doctest::Approx(0.5));
        CHECK(c.side(1) == doctest::Approx(0.5));
        ++count;
    }
    CHECK(count == 4);
    const Rect unit = Rect::unit(3);
    const auto one = GridPartition::identity(unit);
    CHECK(subrects(one).size() == 1);
    CHECK(*subrects(one).begin() == unit);

    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Rect r = testing::random_rect(1 + trial % 4, gen);
        const auto part = testing::random_partition(r, gen);
        double vol = 0.0;
        for (const Rect& c : subrects(part)) vol += c.volume();
        CHECK(vol == doctest::Approx(r.volume()).epsilon(1e-12));
    }
}

TEST_CASE("GridPartition rejects malformed axes") {
    CHECK_THROWS_AS(GridPartition({{0.0, 0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(GridPartition(std::vector<std::vector<double>>{{0.0}}), DomainError);
    CHECK_THROWS_AS(GridPartition({{1.0, 0.5}}), DomainError);
}

TEST_CASE("GridPartition indexing is row-major with the last axis fastest") {
    const GridPartition p({{0.0, 1.0, 2.0}, {0.0, 0.5, 1.0, 1.5}});
    CHECK(p.cell_count() == 6);
    CHECK(p.vertex_count() == 12);
    CHECK(p.vertex(1) == Point{0.0, 0.5});
    CHECK(p.vertex(4) == Point{1.0, 0.0});
    CHECK(p.cell(1) == Rect({0.0, 0.5}, {1.0, 1.0}));
    CHECK(p.cell_index(4) == std::vector<std::size_t>{1, 1});
    CHECK(p.cell_center(0) == Point{0.5, 0.25});
    CHECK(p.vertex_strides() == std::vector<std::size_t>{4, 1});
}

TEST_CASE("GridSample checks size and finiteness") {
    const auto p = GridPartition::identity(Rect::unit(2));
    CHECK_THROWS_AS(GridSample(p, {0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(GridSample(p, {0.0, 0.0, 0.0, std::nan("")}), EvaluationError);
    const GridSample s(p, {0.0, 1.0, 2.0, 3.0});
    const std::vector<std::size_t> idx{1, 0};
    CHECK(s.at(idx) == 2.0);
}

TEST_CASE("QuadrantSign enumerates all patterns") {
    const auto all = QuadrantSign::all(2);
    REQUIRE(all.size() == 4);
    CHECK(all[0] == QuadrantSign::positive(2));
    CHECK(all[1].dirs() == std::vector<int>{-1, 1});
    CHECK(all[3].dirs() == std::vector<int>{-1, -1});
    CHECK_THROWS_AS(QuadrantSign({1, 0}), DomainError);
}
