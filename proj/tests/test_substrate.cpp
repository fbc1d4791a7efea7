#include "fixtures.hpp"

#include <doctest.h>

using namespace mycosim;

TEST_CASE("field construction enforces invariants") {
    CHECK_THROWS_AS(SubstrateField(0, 4, 1, 1.0), DomainError);
    CHECK_THROWS_AS(SubstrateField(4, 4, 1, 0.0), DomainError);
    SubstrateField f(4, 3, 1, 2.0);
    CHECK(f.dimensions() == 2);
    CHECK(f.cell_count() == 12);
    CHECK_THROWS_AS(f.set_nutrient(0, 1.5), DomainError);
    CHECK_THROWS_AS(f.fill_attractant(-0.1), DomainError);
    CHECK(SubstrateField(2, 2, 2, 1.0).dimensions() == 3);
}

TEST_CASE("cell lookup follows half-open cells") {
    SubstrateField f(4, 3, 1, 2.0);
    CHECK(f.cell_at({0.0, 0.0, 0.0}) == f.index(0, 0));
    CHECK(f.cell_at({1.999, 5.9, 0.0}) == f.index(0, 2));
    CHECK(f.cell_at({2.0, 0.0, 0.0}) == f.index(1, 0));
    CHECK_FALSE(f.cell_at({8.0, 0.0, 0.0}).has_value());
    CHECK_FALSE(f.cell_at({-0.01, 0.0, 0.0}).has_value());
    CHECK_FALSE(f.cell_at({1.0, 1.0, 0.5}).has_value());
    f.set_mask(f.index(1, 1), CellState::forbidden);
    CHECK_FALSE(f.growable({3.0, 3.0, 0.0}));
    CHECK(f.growable({1.0, 3.0, 0.0}));
}

TEST_CASE("gradients use central differences per mm") {
    SubstrateField f(5, 5, 1, 2.0);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) f.set_attractant(f.index(i, j), 0.1 * static_cast<double>(i));
    }
    const auto g = f.attractant_gradient({5.0, 5.0, 0.0});
    CHECK(g[0] == doctest::Approx(0.05));
    CHECK(g[1] == doctest::Approx(0.0));
    const auto edge = f.attractant_gradient({0.5, 5.0, 0.0});
    CHECK(edge[0] == doctest::Approx(0.05));
    CHECK(f.repellent_gradient({5.0, 5.0, 0.0}) == Vec3{0.0, 0.0, 0.0});
}

TEST_CASE("substrate text format round-trips") {
    SubstrateField f(3, 2, 1, 0.5);
    f.fill_nutrient(0.25);
    f.set_attractant(f.index(2, 1), 0.75);
    f.set_repellent(f.index(0, 0), 1.0 / 3.0);
    f.set_mask(f.index(1, 0), CellState::forbidden);
    const auto text = format_substrate(f);
    CHECK(text.rfind("myceliumsim/substrate/v1", 0) == 0);
    CHECK(parse_substrate(text) == f);

    const auto dir = fixtures::scratch("substrate");
    save_substrate(f, dir / "f.txt");
    CHECK(load_substrate(dir / "f.txt") == f);
}

TEST_CASE("substrate parser reports line and field") {
    const std::string bad = "myceliumsim/substrate/v1\ndims 2 1 1\ncell_mm 1\nnutrient\n0.5 1.5\n";
    try {
        parse_substrate(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(e.field() == "nutrient");
    }
    CHECK_THROWS_AS(parse_substrate("myceliumsim/substrate/v2\n"), ParseError);
    CHECK_THROWS_AS(parse_substrate("myceliumsim/substrate/v1\ndims 2 1 1\ncell_mm 1\nmask\n0 2\n"), ParseError);
    CHECK_THROWS_AS(load_substrate("no/such/file.txt"), FileError);
    const auto filled = parse_substrate("myceliumsim/substrate/v1\ndims 2 2 1\ncell_mm 1\nfill nutrient 0.8\n");
    CHECK(filled.nutrient(3) == 0.8);
}
