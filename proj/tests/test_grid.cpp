#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "selfsim/errors.hpp"
#include "selfsim/grid.hpp"

using namespace selfsim;

TEST_CASE("geometric nodes") {
    const auto nodes = geometric_nodes(3, 0.01, 100.0);
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[0] == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nodes[2] == doctest::Approx(100.0).epsilon(1e-14));

    const GridPtr g = make_grid(1.0, 4097, 1e-6, 1e3);
    CHECK(g->nodes.front() == 1e-6);
    CHECK(g->nodes.back() == 1e3);
    const double ratio = g->nodes[1] / g->nodes[0];
    for (std::size_t i = 1; i + 1 < g->size(); ++i) {
        CHECK(g->nodes[i + 1] / g->nodes[i] == doctest::Approx(ratio).epsilon(1e-12));
    }
}

TEST_CASE("make_grid rejects bad parameters") {
    CHECK_THROWS_AS(make_grid(0.5, 1), ParameterError);
    CHECK_THROWS_AS(make_grid(0.5, 63), ParameterError);
    CHECK_THROWS_AS(make_grid(0.5, 128, 2.0, 10.0), ParameterError);
    CHECK_THROWS_AS(make_grid(0.5, 128, 1e-3, 0.5), ParameterError);
    CHECK_THROWS_AS(make_grid(1.5, 128), ParameterError);
}

TEST_CASE("default grid invariants") {
    const GridPtr g = make_grid(0.5);
    CHECK(g->size() == kDefaultGridNodes);
    CHECK(g->nodes.front() <= 1e-4);
    CHECK(g->nodes.back() == kDefaultYMax);
    for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->nodes[i] > g->nodes[i - 1]);
}

TEST_CASE("differentiate") {
    const GridPtr g = make_grid(1.0);
    SUBCASE("quadratic exactly") {
        const auto f = GridFunction::sample(g, [](double y) { return y * y; }, 0.0, 0.0);
        const auto d = differentiate(f, 1);
        for (std::size_t i = 2; i + 2 < g->size(); ++i) {
            CHECK(std::abs(d[i] - 2.0 * g->nodes[i]) <= 1e-8 * 2.0 * g->nodes[i]);
        }
        CHECK(d.slope_at_zero() == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("constant has zero derivative") {
        const auto f = GridFunction::sample(g, [](double) { return 3.0; }, 3.0, 0.0);
        const auto d1 = differentiate(f, 1);
        const auto d2 = differentiate(f, 2);
        CHECK(d1.max_abs() == 0.0);
        CHECK(d2.max_abs() == 0.0);
    }
    SUBCASE("sin second derivative") {
        // Nodes in [1e-4, 20]. Below, rounding in the differences is amplified by 1/h^2 with
        // h ~ 4e-3 y; above, the spacing no longer resolves an oscillation of fixed period.
        const auto f = GridFunction::sample(g, [](double y) { return std::sin(y); }, 0.0, 1.0);
        const auto d2 = differentiate(f, 2);
        double err = 0.0;
        for (std::size_t i = 0; i < g->size() && g->nodes[i] <= 20.0; ++i) {
            if (g->nodes[i] < 1e-4) continue;
            err = std::max(err, std::abs(d2[i] + std::sin(g->nodes[i])));
        }
        CHECK(err <= 1e-5);
    }
    SUBCASE("linearity") {
        const auto f = GridFunction::sample(g, [](double y) { return y * std::exp(-y); }, 0.0, 1.0);
        const auto h = GridFunction::sample(g, [](double y) { return std::atan(y); }, 0.0, 1.0);
        const auto lhs = differentiate(2.0 * f - 3.0 * h, 1);
        const auto rhs = 2.0 * differentiate(f, 1) - 3.0 * differentiate(h, 1);
        CHECK((lhs - rhs).max_abs() <= 1e-12 * std::max(1.0, lhs.max_abs()));
    }
    CHECK_THROWS_AS(differentiate(GridFunction::zeros(g), 3), ParameterError);
}

TEST_CASE("weighted norms") {
    const GridPtr g = make_grid(1.0);
    CHECK(norm(GridFunction::zeros(g), {1, 2.0, 0.0}) == 0.0);
    const auto e = GridFunction::sample(g, [](double y) { return std::exp(-y); }, 1.0, -1.0);
    CHECK(norm(e, {0, 2.0, 0.0}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
    CHECK(norm(e, {1, 2.0, 0.0}) == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-5));
    CHECK(norm(-2.5 * e, {1, 2.0, 0.0}) == doctest::Approx(2.5 * norm(e, {1, 2.0, 0.0})).epsilon(1e-12));

    // Second-order refinement: the gap between grids shrinks with n.
    auto sampled = [](std::size_t n) {
        const auto h = make_grid(1.0, n);
        return norm(GridFunction::sample(h, [](double y) { return y / (1.0 + y * y); }, 0.0, 1.0),
                    {1, 2.0, 0.0});
    };
    const double d1 = std::abs(sampled(512) - sampled(1024));
    const double d2 = std::abs(sampled(1024) - sampled(2048));
    CHECK(d2 <= d1 / 3.0 + 1e-13);
}

TEST_CASE("interpolate") {
    const GridPtr g = make_grid(1.0);
    const auto f = GridFunction::sample(g, [](double y) { return y * y * y; }, 0.0, 0.0);
    CHECK(interpolate(f, g->nodes[100]) == f[100]);
    CHECK(interpolate(f, 0.0) == f.value_at_zero());
    for (double x : {0.0123, 0.5, 3.7, 42.0}) {
        CHECK(interpolate(f, x) == doctest::Approx(x * x * x).epsilon(1e-9));
    }
    CHECK_THROWS_AS(interpolate(f, 2e3), RangeError);
}

TEST_CASE("integration helpers") {
    const GridPtr g = make_grid(1.0);
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-g->nodes[i]);
    CHECK(integrate(*g, v) == doctest::Approx(1.0).epsilon(1e-8));
    const auto cum = cumulative_integral(*g, v);
    for (std::size_t i = 0; i < g->size(); i += 97) {
        CHECK(cum[i] == doctest::Approx(-std::expm1(-g->nodes[i])).epsilon(1e-8));
    }
}

TEST_CASE("serialization round trip") {
    const GridPtr g = make_grid(0.5, 256, 1e-5, 1e2);
    const auto f = GridFunction::sample(g, [](double y) { return std::sin(y) / (1.0 + y); }, 0.0, 1.0);
    const auto path = std::filesystem::temp_directory_path() / "selfsim_grid_roundtrip.csv";
    write_grid_function(f, path);
    const GridFunction back = read_grid_function(path);
    REQUIRE(back.size() == f.size());
    CHECK(back.grid().alpha == 0.5);
    CHECK(back.slope_at_zero() == f.slope_at_zero());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}
