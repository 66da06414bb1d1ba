#pragma once

// Two worked model families: a two-color finite-table family where each color
// may produce up to two children, and a thinned-Poisson family where a vertex
// has Poisson(lambda) children independently colored blue or red. Both come
// with closed-form scalar reductions used to cross-check the vector solver.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fixedpoint.hpp"
#include "model.hpp"

namespace gwgames {

inline constexpr int kBlue = 0;
inline constexpr int kRed = 1;

// blue vertices: no children (p0), two blue (pbb), two red (prr), one of each (pbr);
// red vertices: same with q. Player one moves along same-colored edges
// (permissible sets {b} at blue, {r} at red), player two along the others.
struct BinaryParams {
    double p0 = 0, pbb = 0, prr = 0, pbr = 0;
    double q0 = 0, qbb = 0, qrr = 0, qbr = 0;

    void validate() const {
        for (double v : {p0, pbb, prr, pbr, q0, qbb, qrr, qbr})
            if (!(v >= 0.0) || !(v <= 1.0 + kProbTol))
                throw spec_error("binary family parameter outside [0,1]");
        if (std::fabs(p0 + pbb + prr + pbr - 1.0) > kProbTol)
            throw spec_error("blue parameters must sum to 1");
        if (std::fabs(q0 + qbb + qrr + qbr - 1.0) > kProbTol)
            throw spec_error("red parameters must sum to 1");
    }
};

inline ModelSpec binary_to_spec(const BinaryParams& p) {
    p.validate();
    auto blue = OffspringLaw::table(2, {{{0, 0}, p.p0},
                                        {{2, 0}, p.pbb},
                                        {{0, 2}, p.prr},
                                        {{1, 1}, p.pbr}});
    auto red = OffspringLaw::table(2, {{{0, 0}, p.q0},
                                       {{2, 0}, p.qbb},
                                       {{0, 2}, p.qrr},
                                       {{1, 1}, p.qbr}});
    PermissibleSets perm;
    perm.sets = {ColorSet(1) << kBlue, ColorSet(1) << kRed};
    return ModelSpec::create(2, {0.5, 0.5}, {std::move(blue), std::move(red)}, std::move(perm));
}

// 0/1 verdicts per game, first mover and root color
struct BinaryVerdict {
    int draw_normal[2][2];   // [mover][color]
    int draw_misere[2][2];
    int stopper_loss[2];     // stopper first, per root color
    int escaper_win[2];      // escaper first, per root color
    bool all_one = false;    // the degenerate ladder case pbr = qbr = 1
};

// Closed-form verdict: every draw/loss/survival probability above is 1 when
// pbr = qbr = 1 and 0 otherwise. Cross-checked against the vector solver.
inline BinaryVerdict binary_verdict(const BinaryParams& p, double cross_tol = 1e-6) {
    p.validate();
    BinaryVerdict v;
    v.all_one = p.pbr == 1.0 && p.qbr == 1.0;
    int bit = v.all_one ? 1 : 0;
    for (int mover = 0; mover < 2; ++mover)
        for (int color = 0; color < 2; ++color) {
            v.draw_normal[mover][color] = bit;
            v.draw_misere[mover][color] = bit;
        }
    v.stopper_loss[0] = v.stopper_loss[1] = bit;
    v.escaper_win[0] = v.escaper_win[1] = bit;

    ModelSpec spec = binary_to_spec(p);
    OutcomeTable out = solve_outcomes(spec, 1e-13, 2000000);
    auto expect = [&](double got, int want, const std::string& what) {
        if (std::fabs(got - want) > cross_tol)
            throw consistency_error("closed-form verdict disagrees with solver on " + what +
                                    ": " + std::to_string(got) + " vs " + std::to_string(want));
    };
    for (int mover = 0; mover < 2; ++mover) {
        FirstMover f = mover == 0 ? FirstMover::PlayerOne : FirstMover::PlayerTwo;
        for (int color = 0; color < 2; ++color) {
            expect(out.row(GameKind::Normal, f).draw[color], v.draw_normal[mover][color],
                   "normal draw");
            expect(out.row(GameKind::Misere, f).draw[color], v.draw_misere[mover][color],
                   "misere draw");
        }
    }
    for (int color = 0; color < 2; ++color) {
        expect(out.row(GameKind::Escape, FirstMover::PlayerOne).lose[color],
               v.stopper_loss[color], "stopper loss");
        expect(out.row(GameKind::Escape, FirstMover::PlayerTwo).win[color],
               v.escaper_win[color], "escaper survival");
    }
    return v;
}

// Poisson(lambda) children; each child of a blue vertex is blue with
// probability pb, each child of a red vertex is blue with probability qb.
// Same permissible sets as the binary family.
struct PoissonParams {
    double lambda = 1.0, pb = 0.5, qb = 0.5;

    void validate() const {
        if (!(lambda > 0.0) || !(lambda <= 1e4))
            throw spec_error("lambda must lie in (0, 1e4]");
        if (!(pb >= 0.0) || !(pb <= 1.0) || !(qb >= 0.0) || !(qb <= 1.0))
            throw spec_error("color probabilities must lie in [0,1]");
    }
};

inline ModelSpec poisson_to_spec(const PoissonParams& p) {
    p.validate();
    auto blue = OffspringLaw::poisson({p.lambda * p.pb, p.lambda * (1.0 - p.pb)});
    auto red = OffspringLaw::poisson({p.lambda * p.qb, p.lambda * (1.0 - p.qb)});
    PermissibleSets perm;
    perm.sets = {ColorSet(1) << kBlue, ColorSet(1) << kRed};
    return ModelSpec::create(2, {0.5, 0.5}, {std::move(blue), std::move(red)}, std::move(perm));
}

// x -> exp(-a * exp(-b * x)), increasing on [0,1]
struct ScalarMap {
    double a = 0.0, b = 0.0;
    double operator()(double x) const { return std::exp(-a * std::exp(-b * x)); }
};

// Composition f1(f2(x)). Its fixed points on [0,1] carry the win/loss
// probabilities of the game started at the given root color and first mover.
struct ScalarMapPair {
    ScalarMap f1, f2;
    FirstMover mover = FirstMover::PlayerOne;
    int root_color = kBlue;
    bool derived_by_symmetry = false;  // only the blue-root first-player map is stated directly

    double operator()(double x) const { return f1(f2(x)); }
};

inline ScalarMapPair poisson_maps_for(const PoissonParams& p, FirstMover mover, int color) {
    p.validate();
    if (color != kBlue && color != kRed) throw spec_error("root color out of range");
    double lpb = p.lambda * p.pb, lpr = p.lambda * (1.0 - p.pb);
    double lqb = p.lambda * p.qb, lqr = p.lambda * (1.0 - p.qb);
    ScalarMapPair pair;
    pair.mover = mover;
    pair.root_color = color;
    if (mover == FirstMover::PlayerOne) {
        if (color == kBlue) {
            pair.f1 = {lpb, lpr};
            pair.f2 = {lqr, lqb};
            pair.derived_by_symmetry = false;
        } else {
            pair.f1 = {lqr, lqb};
            pair.f2 = {lpb, lpr};
            pair.derived_by_symmetry = true;
        }
    } else {
        if (color == kBlue) {
            pair.f1 = {lpr, lqr};
            pair.f2 = {lqb, lpb};
        } else {
            pair.f1 = {lqb, lpb};
            pair.f2 = {lpr, lqr};
        }
        pair.derived_by_symmetry = true;
    }
    return pair;
}

inline ScalarMapPair poisson_maps(const PoissonParams& p) {
    return poisson_maps_for(p, FirstMover::PlayerOne, kBlue);
}

struct ScalarRoot {
    double x;        // fixed point of the composition
    double lo, hi;   // final bisection bracket
};

struct ScalarFixedPoints {
    std::vector<ScalarRoot> roots;  // increasing
    double min_fp = 0.0, max_fp = 1.0;  // certified by monotone iteration from 0 and 1
    bool grid_ok = true;  // scan extremes agree with the iteration-certified ones
};

// All fixed points of f1(f2(x)) on [0,1] by sign scan + bisection. The map is
// increasing with f(0) > 0 and f(1) < 1, so at least one root exists.
inline ScalarFixedPoints scalar_fixed_points(const ScalarMapPair& f, int grid = 10000) {
    if (grid < 100) throw spec_error("fixed-point grid must have at least 100 cells");
    auto g = [&](double x) { return f(x) - x; };
    ScalarFixedPoints out;
    double prev_x = 0.0, prev_g = g(0.0);
    for (int i = 1; i <= grid; ++i) {
        double x = (double)i / grid, gx = g(x);
        if (prev_g == 0.0) {
            out.roots.push_back({prev_x, prev_x, prev_x});
        } else if ((prev_g > 0.0) != (gx > 0.0) && gx != 0.0) {
            double lo = prev_x, hi = x;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                double gm = g(mid);
                if (gm == 0.0) { lo = hi = mid; break; }
                if ((gm > 0.0) == (prev_g > 0.0)) lo = mid;
                else hi = mid;
            }
            double r = 0.5 * (lo + hi);
            if (std::fabs(f(r) - r) >= 1e-10)
                throw consistency_error("bisection produced a poor fixed point");
            out.roots.push_back({r, lo, hi});
        }
        prev_x = x;
        prev_g = gx;
    }
    if (prev_g == 0.0) out.roots.push_back({1.0, 1.0, 1.0});
    // grid points that are exact zeros can surface twice
    for (size_t i = 1; i < out.roots.size();) {
        if (out.roots[i].x - out.roots[i - 1].x < 2e-9)
            out.roots.erase(out.roots.begin() + i);
        else
            ++i;
    }

    // monotone iteration certifies the extreme fixed points independently
    auto settle = [&](double x) {
        for (long it = 0; it < 5000000; ++it) {
            double y = f(x);
            if (std::fabs(y - x) < 1e-14) return y;
            x = y;
        }
        return x;
    };
    out.min_fp = settle(0.0);
    out.max_fp = settle(1.0);
    out.grid_ok = !out.roots.empty() &&
                  std::fabs(out.min_fp - out.roots.front().x) <= 1e-9 &&
                  std::fabs(out.max_fp - out.roots.back().x) <= 1e-9;
    return out;
}

inline ScalarFixedPoints poisson_scalar_fixed_points(const PoissonParams& p, int grid = 10000) {
    return scalar_fixed_points(poisson_maps(p), grid);
}

// draw (or stopper-loss) probability carried by a scalar reduction
inline double scalar_draw_width(const ScalarFixedPoints& fp) {
    return std::max(0.0, fp.max_fp - fp.min_fp);
}

// One sufficient-condition row for a (first mover, root color) combination.
// normal/misere: the respective draw probability is 0 when the flag is set.
// escape: stopper-first loss probability is 0; only stated for player one.
struct PoissonConditionRow {
    FirstMover mover;
    int color;
    bool derived_by_symmetry;
    bool normal_draw_zero = false;
    bool misere_draw_zero = false;
    std::optional<bool> stopper_loss_zero;  // player-one rows only
};

struct PoissonConditions {
    bool all_zero = false;  // small product condition: every draw and stopper loss is 0
    std::array<PoissonConditionRow, 4> rows;
};

namespace detail {

// conditions on the pair exp(-a1 e^{-b1 x}) o exp(-a2 e^{-b2 x}), evaluated in
// log space so zero rates degrade gracefully
inline bool cond_tail(double a2, double b2) {
    return a2 > 0.0 && std::log(a2) - b2 >= 0.0;
}

inline bool cond_normal(double a1, double b1, double a2, double b2) {
    if (!cond_tail(a2, b2)) return false;
    double u = std::exp(-a2 * std::exp(-b2));
    return a1 > 0.0 && std::log(a1) - b1 * u >= 0.0;
}

inline bool cond_misere(double a1, double b1, double a2, double b2) {
    if (!cond_tail(a2, b2)) return false;
    double u = 1.0 - std::exp(-a2);
    return a1 > 0.0 && std::log(a1) - b1 * u >= 0.0;
}

inline bool cond_escape(double a1, double b1, double a2, double b2) {
    if (!cond_tail(a2, b2)) return false;
    double u = std::exp(-a2 * std::exp(-b2)) - std::exp(-a2);
    return a1 > 0.0 && std::log(a1) - b1 * u >= 0.0;
}

}  // namespace detail

// Closed-form sufficient conditions for zero draw/loss probabilities in the
// thinned-Poisson family. When cross_tol > 0 every fired condition is checked
// against the vector solver and a violation raises consistency_error.
inline PoissonConditions poisson_conditions(const PoissonParams& p, double cross_tol = 1e-8) {
    p.validate();
    double lpb = p.lambda * p.pb, lpr = p.lambda * (1.0 - p.pb);
    double lqb = p.lambda * p.qb, lqr = p.lambda * (1.0 - p.qb);

    PoissonConditions out;
    // log of lambda^4 pb (1-pb) qb (1-qb) against the explicit bound
    double log_lhs = std::log(lpb) + std::log(lpr) + std::log(lqb) + std::log(lqr);
    double rhs = lpr * std::exp(-lqr) +
                 lpb * std::exp(-lpr * std::exp(-lqr * std::exp(-lqb))) +
                 lqr * std::exp(-lqb);
    out.all_zero = !(log_lhs > rhs);  // -inf passes

    for (int i = 0; i < 4; ++i) {
        FirstMover mover = i < 2 ? FirstMover::PlayerOne : FirstMover::PlayerTwo;
        int color = (i % 2 == 0) ? kBlue : kRed;
        ScalarMapPair maps = poisson_maps_for(p, mover, color);
        PoissonConditionRow row;
        row.mover = mover;
        row.color = color;
        row.derived_by_symmetry = maps.derived_by_symmetry;
        double a1 = maps.f1.a, b1 = maps.f1.b, a2 = maps.f2.a, b2 = maps.f2.b;
        row.normal_draw_zero = detail::cond_normal(a1, b1, a2, b2);
        row.misere_draw_zero = detail::cond_misere(a1, b1, a2, b2);
        if (mover == FirstMover::PlayerOne)
            row.stopper_loss_zero = detail::cond_escape(a1, b1, a2, b2);
        out.rows[i] = row;
    }

    if (cross_tol > 0.0) {
        ModelSpec spec = poisson_to_spec(p);
        OutcomeTable table = solve_outcomes(spec, 1e-13, 2000000);
        auto check = [&](bool fired, double value, const std::string& what) {
            if (fired && value > cross_tol)
                throw consistency_error("condition promised zero " + what + " but solver found " +
                                        std::to_string(value));
        };
        for (const auto& row : out.rows) {
            check(row.normal_draw_zero || out.all_zero,
                  table.row(GameKind::Normal, row.mover).draw[row.color], "normal draw");
            check(row.misere_draw_zero || out.all_zero,
                  table.row(GameKind::Misere, row.mover).draw[row.color], "misere draw");
            if (row.stopper_loss_zero.has_value())
                check(*row.stopper_loss_zero || out.all_zero,
                      table.row(GameKind::Escape, FirstMover::PlayerOne).lose[row.color],
                      "stopper loss");
        }
    }
    return out;
}

}  // namespace gwgames
