#include "support.hpp"

#include <doctest.h>

using namespace hkvar;
using namespace hkvar::testing;

TEST_CASE("relations") {
    CHECK(relation_holds(1.0, 1.0, Relation::LE, 0.0));
    CHECK(relation_holds(1.1, 1.0, Relation::LE, 0.2));
    CHECK_FALSE(relation_holds(1.3, 1.0, Relation::LE, 0.2));
    CHECK(relation_holds(0.9, 1.0, Relation::EQ, 0.1 + 1e-12));
    CHECK_FALSE(relation_holds(0.5, 1.0, Relation::EQ, 0.1));
    CHECK_FALSE(relation_holds(std::nan(""), 1.0, Relation::LE, 1.0));
    CHECK(to_string(Relation::LE) == "LE");
    CHECK(to_string(Relation::EQ) == "EQ");
}

TEST_CASE("report pass is recomputable from its relations") {
    TheoremReport r;
    r.lhs = 1.0;
    r.rhs = 2.0;
    r.add_side_condition("extra", 3.0, 1.0, Relation::LE, 0.0);
    r.finalize();
    CHECK_FALSE(r.pass);
    CHECK(r.recompute_pass() == r.pass);
    r.side_conditions.clear();
    r.finalize();
    CHECK(r.pass);
}

TEST_CASE("monotone Lebesgue check on xy and the Cantor product") {
    {
        const auto f = restrict_to(product_oracle(2), Rect::unit(2));
        const auto rep = check_lebesgue_monotone(f, Rect::unit(2), GridPartition::uniform(Rect::unit(2), 8),
                                                 HSchedule::for_rect(Rect::unit(2)));
        CHECK(rep.pass);
        CHECK(rep.lhs == doctest::Approx(1.0));
        CHECK(rep.rhs == doctest::Approx(1.0));
        CHECK(rep.recompute_pass() == rep.pass);
    }
    {
        const auto z = zoo_build("cantor_product");
        const auto rep = check_lebesgue_monotone(z.f, z.entry.rect, GridPartition::uniform(z.entry.rect, 32),
                                                 HSchedule::for_rect(z.entry.rect));
        CHECK(rep.pass);
        CHECK(rep.lhs <= 0.05);
        CHECK(rep.rhs == doctest::Approx(1.0));
    }
}

TEST_CASE("monotone check rejects non-monotone input") {
    const auto f = product_oracle(2, -1.0);
    CHECK_THROWS_AS(check_lebesgue_monotone(f, Rect::unit(2), GridPartition::uniform(Rect::unit(2), 4),
                                            HSchedule::for_rect(Rect::unit(2))),
                    PreconditionError);
}

TEST_CASE("FTC and rigidity") {
    const auto z = zoo_build("sin_product");
    const auto rep = check_ftc(z.f, z.entry.rect, GridPartition::uniform(z.entry.rect, 16),
                               HSchedule::for_rect(z.entry.rect), 1e-3, true);
    CHECK(rep.pass);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-3));
    const auto sep = zoo_build("additive_separable");
    const auto rig = check_zero_derivative_rigidity(sep.f, sep.entry.rect, 1e-12);
    CHECK(rig.pass);
    CHECK(rig.lhs <= 1e-12);
    const auto bad = check_zero_derivative_rigidity(product_oracle(2), Rect::unit(2), 1e-12);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("antiderivative of a constant density") {
    const auto one = FuncSource::oracle(2, [](std::span<const double>) { return 2.0; });
    const auto F = antiderivative(one, Rect::unit(2), GridPartition::uniform(Rect::unit(2), 2));
    CHECK(F(std::vector<double>{0.5, 0.25}) == doctest::Approx(0.25));
    CHECK(F(std::vector<double>{1.0, 1.0}) == doctest::Approx(2.0));
}

TEST_CASE("batch applicability and determinism") {
    const auto ids = theorem_ids();
    CHECK(ids.size() == 8);
    const auto kink = zoo_build("kink");
    CHECK(theorem_applies("lebesgue_bv", kink.entry));
    CHECK_FALSE(theorem_applies("ftc", kink.entry));
    CHECK_FALSE(theorem_applies("zero_derivative_rigidity", kink.entry));

    VerifyConfig cfg;
    cfg.theorems = {"zero_derivative_rigidity", "lebesgue_monotone"};
    cfg.functions = {"constant", "coordinate_product"};
    cfg.seed = 5;
    const auto a = run_verification(cfg);
    cfg.jobs = 2;
    const auto b = run_verification(cfg);
    CHECK(reports_to_json(a) == reports_to_json(b));
    REQUIRE(a.size() == 3);
    for (const auto& r : a) {
        CHECK(r.pass);
        CHECK(r.recompute_pass() == r.pass);
    }
    cfg.theorems = {"bogus"};
    CHECK_THROWS_AS(run_verification(cfg), std::invalid_argument);
}

TEST_CASE("precondition failures become failing reports") {
    VerifyConfig cfg;
    const auto z = zoo_build("neg_product");
    const auto rep = run_theorem("lebesgue_monotone", z, cfg);
    CHECK_FALSE(rep.pass);
    CHECK(rep.notes.count("precondition") == 1);
}
