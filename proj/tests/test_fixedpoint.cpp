#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gwgames/casestudies.hpp"
#include "gwgames/fixedpoint.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace gwgames;

namespace {

const GameKind kKinds[3] = {GameKind::Normal, GameKind::Misere, GameKind::Escape};
const FirstMover kMovers[2] = {FirstMover::PlayerOne, FirstMover::PlayerTwo};

ModelSpec childless_spec() {
    auto law = OffspringLaw::table(2, {{{0, 0}, 1.0}});
    PermissibleSets perm;
    perm.sets = {1u, 2u};
    return ModelSpec::create(2, {0.5, 0.5}, {law, law}, perm);
}

}  // namespace

TEST_CASE("game maps preserve the componentwise order") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed + 500)
                                       : testgen::random_poisson_spec(seed + 500);
        RngStream rng(seed, 99);
        std::vector<double> x(spec.m), y(spec.m);
        for (int k = 0; k < spec.m; ++k) {
            x[k] = rng.next_unit();
            y[k] = x[k] + (1.0 - x[k]) * rng.next_unit();
        }
        for (GameKind kind : kKinds)
            for (FirstMover mover : kMovers) {
                GameMap map(kind, mover, spec);
                auto fx = map(x), fy = map(y);
                for (int k = 0; k < spec.m; ++k) {
                    REQUIRE(fx[k] <= fy[k] + 1e-12);
                    REQUIRE(fx[k] >= 0.0);
                    REQUIRE(fx[k] <= 1.0);
                }
            }
    }
}

TEST_CASE("least fixed point sits below the greatest one") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ModelSpec spec = testgen::random_table_spec(seed + 900);
        for (GameKind kind : kKinds)
            for (FirstMover mover : kMovers) {
                GameMap map(kind, mover, spec);
                auto lo = least_fixed_point(map, 1e-12, 500000);
                auto hi = greatest_fixed_point(map, 1e-12, 500000);
                REQUIRE(lo.converged);
                REQUIRE(hi.converged);
                REQUIRE(lo.iterations >= 1);
                REQUIRE(lo.delta < 1e-12);
                for (int k = 0; k < spec.m; ++k)
                    REQUIRE(lo.point[k] <= hi.point[k] + 1e-10);
                // fixed points stay put under one more application
                auto lo2 = map(lo.point);
                for (int k = 0; k < spec.m; ++k)
                    REQUIRE(std::fabs(lo2[k] - lo.point[k]) < 1e-10);
            }
    }
}

TEST_CASE("iteration cap reports non-convergence") {
    ModelSpec spec = binary_to_spec({0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    // perturb toward a slowly converging regime
    ModelSpec slow = binary_to_spec({0.01, 0.0, 0.0, 0.99, 0.01, 0.0, 0.0, 0.99});
    GameMap map(GameKind::Normal, FirstMover::PlayerOne, slow);
    auto res = greatest_fixed_point(map, 1e-15, 3);
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.iterations == 3);
    (void)spec;
}

TEST_CASE("solved outcomes are stochastically coherent") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed + 40)
                                       : testgen::random_poisson_spec(seed + 40);
        OutcomeTable table = solve_outcomes(spec, 1e-12, 500000);
        REQUIRE(table.rows.size() == 6);
        for (const auto& row : table.rows) {
            for (int j = 0; j < spec.m; ++j) {
                REQUIRE(row.win[j] >= 0.0);
                REQUIRE(row.lose[j] >= 0.0);
                REQUIRE(row.draw[j] >= 0.0);
                REQUIRE(row.win[j] + row.lose[j] + row.draw[j] == Catch::Approx(1.0).margin(1e-9));
                if (row.kind == GameKind::Escape) REQUIRE(row.draw[j] == 0.0);
            }
        }
    }
}

TEST_CASE("childless model resolves immediately") {
    OutcomeTable table = solve_outcomes(childless_spec());
    for (int j = 0; j < 2; ++j) {
        REQUIRE(table.row(GameKind::Normal, FirstMover::PlayerOne).lose[j] == 1.0);
        REQUIRE(table.row(GameKind::Normal, FirstMover::PlayerOne).win[j] == 0.0);
        REQUIRE(table.row(GameKind::Misere, FirstMover::PlayerOne).win[j] == 1.0);
        // any stuck player hands the win to player one in the escape game
        REQUIRE(table.row(GameKind::Escape, FirstMover::PlayerOne).win[j] == 1.0);
        REQUIRE(table.row(GameKind::Escape, FirstMover::PlayerTwo).lose[j] == 1.0);
    }
}

TEST_CASE("single-color ladder: first player always wins the normal game") {
    // blue vertices always produce two blue children, red two red ones; the
    // first player steps to a same-colored child and the opponent is stuck
    ModelSpec spec = binary_to_spec({0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0});
    OutcomeTable table = solve_outcomes(spec);
    oracles::ExactGame oracle(spec, GameKind::Normal);
    for (int j = 0; j < 2; ++j) {
        REQUIRE(table.row(GameKind::Normal, FirstMover::PlayerOne).win[j] ==
                Catch::Approx(1.0).margin(1e-12));
        // the depth-limited oracle reaches the same value by round 2
        REQUIRE(oracle.at(j, 0, 2).win == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(oracle.at(j, 0, 5).win == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("truncated values start at zero and grow toward the fixed points") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed + 60)
                                       : testgen::random_poisson_spec(seed + 60);
        TruncatedValues v0 = truncated_values(spec, 0);
        for (int j = 0; j < spec.m; ++j) {
            REQUIRE(v0.nw1[j] == 0.0);
            REQUIRE(v0.eel[j] == 0.0);
        }
        OutcomeTable table = solve_outcomes(spec);
        TruncatedValues prev = v0;
        for (int n = 1; n <= 24; ++n) {
            TruncatedValues cur = truncated_values(spec, n);
            auto families = [](const TruncatedValues& t) {
                return std::vector<const std::vector<double>*>{
                    &t.nw1, &t.nw2, &t.nl1, &t.nl2, &t.mw1,
                    &t.mw2, &t.ml1, &t.ml2, &t.esw, &t.eel};
            };
            auto fp = families(prev), fc = families(cur);
            for (size_t f = 0; f < fp.size(); ++f)
                for (int j = 0; j < spec.m; ++j)
                    REQUIRE((*fc[f])[j] >= (*fp[f])[j] - 1e-12);
            prev = cur;
        }
        // limits bound the truncations from above
        for (int j = 0; j < spec.m; ++j) {
            REQUIRE(prev.nw1[j] <=
                    table.row(GameKind::Normal, FirstMover::PlayerOne).win[j] + 1e-9);
            REQUIRE(prev.ml2[j] <=
                    table.row(GameKind::Misere, FirstMover::PlayerTwo).lose[j] + 1e-9);
            REQUIRE(prev.esw[j] <=
                    table.row(GameKind::Escape, FirstMover::PlayerOne).win[j] + 1e-9);
        }
    }
}

TEST_CASE("first truncation step matches the stuck probabilities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ModelSpec spec = testgen::random_table_spec(seed + 70);
        auto [a, b] = alpha_beta(spec);
        TruncatedValues v = truncated_values(spec, 1);
        for (int j = 0; j < spec.m; ++j) {
            REQUIRE(v.nw1[j] == Catch::Approx(0.0).margin(1e-15));
            REQUIRE(v.nl1[j] == Catch::Approx(a[j]).margin(1e-15));
            REQUIRE(v.mw1[j] == Catch::Approx(a[j]).margin(1e-15));
            REQUIRE(v.ml1[j] == Catch::Approx(0.0).margin(1e-15));
            REQUIRE(v.esw[j] == Catch::Approx(a[j]).margin(1e-15));
            REQUIRE(v.eel[j] == Catch::Approx(b[j]).margin(1e-15));
        }
    }
}

TEST_CASE("two extra rounds apply the game maps once") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed + 80)
                                       : testgen::random_poisson_spec(seed + 80);
        int n = 1 + (int)(seed % 5);
        TruncatedValues v = truncated_values(spec, n);
        TruncatedValues w = truncated_values(spec, n + 2);
        auto flip = [&](const std::vector<double>& x) {
            std::vector<double> out(spec.m);
            for (int k = 0; k < spec.m; ++k) out[k] = 1.0 - x[k];
            return out;
        };
        auto expect_eq = [&](const std::vector<double>& got, const std::vector<double>& want) {
            for (int k = 0; k < spec.m; ++k)
                REQUIRE(got[k] == Catch::Approx(want[k]).margin(1e-12));
        };
        GameMap fn1(GameKind::Normal, FirstMover::PlayerOne, spec);
        GameMap fn2(GameKind::Normal, FirstMover::PlayerTwo, spec);
        GameMap fm1(GameKind::Misere, FirstMover::PlayerOne, spec);
        GameMap fm2(GameKind::Misere, FirstMover::PlayerTwo, spec);
        GameMap fe1(GameKind::Escape, FirstMover::PlayerOne, spec);
        GameMap fe2(GameKind::Escape, FirstMover::PlayerTwo, spec);
        expect_eq(w.nw1, fn1(v.nw1));
        expect_eq(w.nl1, flip(fn1(flip(v.nl1))));
        expect_eq(w.nw2, fn2(v.nw2));
        expect_eq(w.nl2, flip(fn2(flip(v.nl2))));
        expect_eq(w.mw1, fm1(v.mw1));
        expect_eq(w.ml1, flip(fm1(flip(v.ml1))));
        expect_eq(w.mw2, fm2(v.mw2));
        expect_eq(w.ml2, flip(fm2(flip(v.ml2))));
        expect_eq(w.esw, fe1(v.esw));
        expect_eq(w.eel, flip(fe2(flip(v.eel))));
    }
}

TEST_CASE("exact enumeration reproduces truncated values on small specs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ModelSpec spec = testgen::small_table_spec(seed + 7);
        int depth = 1 + (int)(seed % 6);
        TruncatedValues v = truncated_values(spec, depth);
        oracles::ExactGame normal(spec, GameKind::Normal);
        oracles::ExactGame misere(spec, GameKind::Misere);
        oracles::ExactGame escape(spec, GameKind::Escape);
        for (int j = 0; j < spec.m; ++j) {
            REQUIRE(normal.at(j, 0, depth).win == Catch::Approx(v.nw1[j]).margin(1e-12));
            REQUIRE(normal.at(j, 0, depth).lose == Catch::Approx(v.nl1[j]).margin(1e-12));
            REQUIRE(normal.at(j, 1, depth).win == Catch::Approx(v.nw2[j]).margin(1e-12));
            REQUIRE(normal.at(j, 1, depth).lose == Catch::Approx(v.nl2[j]).margin(1e-12));
            REQUIRE(misere.at(j, 0, depth).win == Catch::Approx(v.mw1[j]).margin(1e-12));
            REQUIRE(misere.at(j, 0, depth).lose == Catch::Approx(v.ml1[j]).margin(1e-12));
            REQUIRE(misere.at(j, 1, depth).win == Catch::Approx(v.mw2[j]).margin(1e-12));
            REQUIRE(misere.at(j, 1, depth).lose == Catch::Approx(v.ml2[j]).margin(1e-12));
            REQUIRE(escape.at(j, 0, depth).win == Catch::Approx(v.esw[j]).margin(1e-12));
            REQUIRE(escape.at(j, 1, depth).lose == Catch::Approx(v.eel[j]).margin(1e-12));
            // the stopper cannot lose, nor the escaper win, inside the horizon
            REQUIRE(escape.at(j, 0, depth).lose == 0.0);
            REQUIRE(escape.at(j, 1, depth).win == 0.0);
        }
    }
}
