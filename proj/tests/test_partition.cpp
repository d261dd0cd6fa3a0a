#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsis/errors.hpp"
#include "gsis/partition.hpp"

using namespace gsis;

TEST_CASE("uniform partition has equal cells and exact edges") {
    Partition p = Partition::uniform(4);
    CHECK(p.size() == 4);
    REQUIRE(p.edges().size() == 5);
    CHECK(p.edges()[0] == 0.0);
    CHECK(p.edges()[4] == 1.0);
    CHECK(p.edges()[2] == doctest::Approx(0.5).epsilon(1e-15));
    for (double w : p.weights()) {
        CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    }
    CHECK(p.min_weight() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.midpoints()[0] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("graded partition follows the power rule x_j = (j/M)^kappa") {
    Partition p = Partition::graded(4, 2.0);
    const std::vector<double> expected = {0.0, 0.0625, 0.25, 0.5625, 1.0};
    REQUIRE(p.edges().size() == expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j) {
        CHECK(p.edges()[j] == doctest::Approx(expected[j]).epsilon(1e-14));
    }
}

TEST_CASE("from_weights reconstructs cumulative edges") {
    Partition p = Partition::from_weights({0.5, 0.25, 0.25});
    CHECK(p.size() == 3);
    CHECK(p.edges()[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.edges()[2] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p.min_weight() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("partition construction rejects malformed breakpoints") {
    CHECK_THROWS_AS(Partition({0.1, 0.5, 1.0}), ValidationError);
    CHECK_THROWS_AS(Partition({0.0, 0.5, 0.9}), ValidationError);
    CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5, 1.0}), ValidationError);
    CHECK_THROWS_AS(Partition({0.0, 0.7, 0.3, 1.0}), ValidationError);
    CHECK_THROWS_AS(Partition::from_weights({0.5, -0.1, 0.6}), ValidationError);
    CHECK_THROWS_AS(Partition::from_weights({0.5, 0.4}), ValidationError);
    CHECK_THROWS_AS(Partition::graded(4, 0.5), ValidationError);
    CHECK_THROWS_AS(Partition::uniform(0), ValidationError);
}

TEST_CASE("cell_of locates interior points and clamps the boundary") {
    Partition p = Partition::uniform(4);
    CHECK(p.cell_of(0.1) == 0);
    CHECK(p.cell_of(0.3) == 1);
    CHECK(p.cell_of(0.6) == 2);
    CHECK(p.cell_of(0.99) == 3);
    CHECK(p.cell_of(0.0) == 0);
    CHECK(p.cell_of(1.0) == 3);
    CHECK(p.cell_of(-0.5) == 0);
    CHECK(p.cell_of(1.5) == 3);
}

TEST_CASE("quadrature on a non-uniform partition matches hand integrals") {
    auto part = std::make_shared<const Partition>(Partition::from_weights({0.25, 0.75}));
    Field f(part, {1.0, 3.0});
    // integral f = 0.25*1 + 0.75*3, integral f^2 = 0.25 + 0.75*9
    CHECK(integral(f) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(inner(f, f) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(norm_l2(f) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-15));
    CHECK(norm_sup(f) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(min_value(f) == doctest::Approx(1.0).epsilon(1e-15));

    Field g = Field::constant(part, 2.0);
    CHECK(integral(g) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(norm_l2(g) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(inner(f, g) == doctest::Approx(5.0).epsilon(1e-15));

    Field h = axpby(2.0, f, -1.0, g);
    CHECK(h[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h[1] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("clipped01 clamps reported values without touching the source") {
    auto part = std::make_shared<const Partition>(Partition::uniform(3));
    Field f(part, {-0.5, 0.5, 1.5});
    Field c = clipped01(f);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.5);
    CHECK(c[2] == 1.0);
    CHECK(f[0] == -0.5);
    CHECK(f[2] == 1.5);
}

TEST_CASE("require_same_partition accepts equal breakpoints, rejects mismatches") {
    auto a = std::make_shared<const Partition>(Partition::uniform(4));
    auto b = std::make_shared<const Partition>(Partition::uniform(4));
    auto c = std::make_shared<const Partition>(Partition::uniform(5));
    Field fa = Field::constant(a, 1.0);
    Field fb = Field::constant(b, 2.0);
    Field fc = Field::constant(c, 3.0);
    CHECK_NOTHROW(require_same_partition(fa, fb, "test"));
    CHECK_THROWS_AS(require_same_partition(fa, fc, "test"), DimensionError);
    CHECK_THROWS_AS(inner(fa, fc), DimensionError);
    CHECK_THROWS_AS(axpby(1.0, fa, 1.0, fc), DimensionError);
}
