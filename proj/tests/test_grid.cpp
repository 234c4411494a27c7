#include <doctest.h>

#include <limits>

#include "bevcomm/grid.hpp"

using namespace bevcomm;

namespace {
const GridShape kPlane12{1, 2, 1, 1.0};
}

TEST_CASE("grid shape validates extents") {
    CHECK_THROWS_AS((GridShape{0, 4, 1, 1.0}.validate()), DimensionError);
    CHECK_THROWS_AS((GridShape{4, -1, 1, 1.0}.validate()), DimensionError);
    CHECK_THROWS_AS((GridShape{4, 4, 0, 1.0}.validate()), DimensionError);
    CHECK_THROWS_AS((GridShape{4, 4, 1, 0.0}.validate()), DimensionError);
    CHECK_NOTHROW((GridShape{4, 4, 1, 0.5}.validate()));
    CHECK((GridShape{3, 5, 2, 1.0}.cell_count()) == 15);
    CHECK((GridShape{3, 5, 2, 1.0}.value_count()) == 30);
}

TEST_CASE("maps validate their value vectors") {
    CHECK_THROWS_AS(FeatureMap(kPlane12, {1.0}), DimensionError);
    CHECK_THROWS_AS(ScalarMap(kPlane12, {0.5, 1.5}), DimensionError);
    CHECK_THROWS_AS(ScalarMap(kPlane12, {-0.1, 0.5}), DimensionError);
    CHECK_THROWS_AS(SelectionMask(kPlane12, {0, 2}), DimensionError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(FeatureMap(kPlane12, {inf, 0.0}), DimensionError);
}

TEST_CASE("elementwise_mul hand example") {
    const ScalarMap a(kPlane12, {0.5, 0.2});
    const ScalarMap b(kPlane12, {0.4, 1.0});
    const ScalarMap p = elementwise_mul(a, b);
    CHECK(p.at(0, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(p.at(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("elementwise_mul identity and absorbing elements") {
    const ScalarMap b(kPlane12, {0.37, 0.91});
    CHECK(elementwise_mul(ScalarMap::constant(kPlane12, 1.0), b) == b);
    CHECK(elementwise_mul(ScalarMap::constant(kPlane12, 0.0), b) ==
          ScalarMap::constant(kPlane12, 0.0));
}

TEST_CASE("mask_apply gates whole cells") {
    const GridShape g{2, 2, 1, 1.0};
    const FeatureMap f(g, {1, 2, 3, 4});
    const SelectionMask m(g, {1, 0, 0, 1});
    const FeatureMap out = mask_apply(m, f);
    CHECK(out.values() == std::vector<double>{1, 0, 0, 4});
    CHECK(mask_apply(SelectionMask::all(g), f) == f);
    CHECK(mask_apply(SelectionMask::none(g), f) == FeatureMap::zeros(g));
}

TEST_CASE("mask popcount and any") {
    const GridShape g{2, 2, 1, 1.0};
    CHECK(SelectionMask::none(g).popcount() == 0);
    CHECK_FALSE(SelectionMask::none(g).any());
    CHECK(SelectionMask(g, {0, 1, 0, 0}).popcount() == 1);
    CHECK(SelectionMask(g, {0, 1, 0, 0}).any());
    CHECK(SelectionMask::all(g).popcount() == 4);
}

TEST_CASE("plane mismatch is rejected") {
    const GridShape g2{2, 2, 1, 1.0};
    const ScalarMap a(kPlane12, {0.1, 0.2});
    const ScalarMap b(g2, {0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(elementwise_mul(a, b), DimensionError);
}
