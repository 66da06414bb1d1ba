#pragma once

// Win/lose/draw probabilities for the three games (normal, misere, escape)
// via monotone fixed-point iteration of the per-game maps on [0,1]^m, plus
// the depth-truncated value recursions.

#include <string>
#include <vector>

#include "model.hpp"

namespace gwgames {

enum class GameKind { Normal, Misere, Escape };
enum class FirstMover { PlayerOne, PlayerTwo };

inline const char* game_name(GameKind k) {
    switch (k) {
        case GameKind::Normal: return "normal";
        case GameKind::Misere: return "misere";
        default: return "escape";
    }
}

inline const char* mover_name(FirstMover f) {
    return f == FirstMover::PlayerOne ? "p1" : "p2";
}

// Monotone self-map of [0,1]^m whose extreme fixed points are the win/lose
// probabilities for (kind, first mover). Player one moves to colors in the
// permissible sets, player two to their complements.
struct GameMap {
    GameKind kind;
    FirstMover mover;
    const ModelSpec* spec;
    std::vector<double> alpha, beta;

    GameMap(GameKind k, FirstMover f, const ModelSpec& s) : kind(k), mover(f), spec(&s) {
        auto [a, b] = alpha_beta(s);
        alpha = a.values;
        beta = b.values;
    }

    std::vector<double> operator()(const std::vector<double>& x) const {
        const ModelSpec& sp = *spec;
        int m = sp.m;
        if ((int)x.size() != m) throw spec_error("game map point has wrong length");
        std::vector<double> inner(m), y(m);
        if (mover == FirstMover::PlayerOne) {
            // inner[k] = chance the opponent cannot save the game from a color-k child
            for (int k = 0; k < m; ++k) {
                double g = pgf_eval(sp.offspring[k], sp.counter_moves(k), x);
                double v = 1.0 - g;
                if (kind == GameKind::Misere) v += beta[k];
                inner[k] = std::clamp(v, 0.0, 1.0);
            }
            for (int j = 0; j < m; ++j) {
                double g = pgf_eval(sp.offspring[j], sp.moves(j), inner);
                double v = 1.0 - g;
                if (kind != GameKind::Normal) v += alpha[j];
                y[j] = std::clamp(v, 0.0, 1.0);
            }
        } else {
            for (int k = 0; k < m; ++k) {
                double g = pgf_eval(sp.offspring[k], sp.moves(k), x);
                double v = 1.0 - g;
                if (kind != GameKind::Normal) v += alpha[k];
                inner[k] = std::clamp(v, 0.0, 1.0);
            }
            for (int j = 0; j < m; ++j) {
                double g = pgf_eval(sp.offspring[j], sp.counter_moves(j), inner);
                double v = 1.0 - g;
                if (kind == GameKind::Misere) v += beta[j];
                y[j] = std::clamp(v, 0.0, 1.0);
            }
        }
        return y;
    }
};

struct FixedPointResult {
    std::vector<double> point;
    long iterations = 0;
    double delta = 0.0;  // sup-norm step size at exit
    bool converged = false;
};

namespace detail {

inline FixedPointResult iterate_monotone(const GameMap& map, std::vector<double> x,
                                         bool upward, double tol, long max_iter) {
    FixedPointResult res;
    for (long it = 1; it <= max_iter; ++it) {
        std::vector<double> y = map(x);
        double delta = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            double drift = upward ? x[i] - y[i] : y[i] - x[i];
            if (drift > 1e-12)
                throw consistency_error("fixed-point iteration lost monotonicity (drift " +
                                        std::to_string(drift) + ")");
            y[i] = upward ? std::max(y[i], x[i]) : std::min(y[i], x[i]);
            delta = std::max(delta, std::fabs(y[i] - x[i]));
        }
        x.swap(y);
        res.iterations = it;
        res.delta = delta;
        if (delta < tol) {
            res.converged = true;
            break;
        }
    }
    res.point = std::move(x);
    return res;
}

}  // namespace detail

inline FixedPointResult least_fixed_point(const GameMap& map, double tol = 1e-12,
                                          long max_iter = 1000000) {
    return detail::iterate_monotone(map, std::vector<double>(map.spec->m, 0.0), true, tol, max_iter);
}

inline FixedPointResult greatest_fixed_point(const GameMap& map, double tol = 1e-12,
                                             long max_iter = 1000000) {
    return detail::iterate_monotone(map, std::vector<double>(map.spec->m, 1.0), false, tol, max_iter);
}

struct OutcomeRow {
    GameKind kind;
    FirstMover mover;
    std::vector<double> win, lose, draw;
    long iterations = 0;
    double delta = 0.0;
    bool converged = false;
};

struct OutcomeTable {
    int m = 0;
    std::vector<OutcomeRow> rows;  // normal p1, normal p2, misere p1, misere p2, escape p1, escape p2

    const OutcomeRow& row(GameKind k, FirstMover f) const {
        for (const auto& r : rows)
            if (r.kind == k && r.mover == f) return r;
        throw consistency_error("missing outcome row");
    }
};

// Solve all six (game, first mover) combinations. Win probabilities are least
// fixed points, loss probabilities come from greatest fixed points, draws are
// the gap; the escape game has no draws.
inline OutcomeTable solve_outcomes(const ModelSpec& spec, double tol = 1e-12,
                                   long max_iter = 1000000) {
    OutcomeTable table;
    table.m = spec.m;
    for (GameKind kind : {GameKind::Normal, GameKind::Misere, GameKind::Escape}) {
        for (FirstMover mover : {FirstMover::PlayerOne, FirstMover::PlayerTwo}) {
            GameMap map(kind, mover, spec);
            OutcomeRow row;
            row.kind = kind;
            row.mover = mover;
            if (kind == GameKind::Escape) {
                // first-mover win: least fixed point for the stopper, greatest
                // for the escaper (who wins only by playing forever)
                FixedPointResult fp = mover == FirstMover::PlayerOne
                                          ? least_fixed_point(map, tol, max_iter)
                                          : greatest_fixed_point(map, tol, max_iter);
                row.iterations = fp.iterations;
                row.delta = fp.delta;
                row.converged = fp.converged;
                row.win.resize(spec.m);
                row.lose.resize(spec.m);
                row.draw.assign(spec.m, 0.0);
                for (int j = 0; j < spec.m; ++j) {
                    row.win[j] = fp.point[j];
                    row.lose[j] = 1.0 - fp.point[j];
                }
            } else {
                FixedPointResult lo = least_fixed_point(map, tol, max_iter);
                FixedPointResult hi = greatest_fixed_point(map, tol, max_iter);
                row.iterations = std::max(lo.iterations, hi.iterations);
                row.delta = std::max(lo.delta, hi.delta);
                row.converged = lo.converged && hi.converged;
                row.win = lo.point;
                row.lose.resize(spec.m);
                row.draw.resize(spec.m);
                for (int j = 0; j < spec.m; ++j) {
                    row.lose[j] = 1.0 - hi.point[j];
                    double d = hi.point[j] - lo.point[j];
                    if (d < -1e-9)
                        throw consistency_error("draw probability " + std::to_string(d) +
                                                " below zero for " + game_name(kind));
                    row.draw[j] = std::max(d, 0.0);
                }
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

// Values of games truncated after `depth` rounds (a round = one move).
// nw1[j]: player one moving first wins within the budget from a color-j root;
// nl1[j]: player one moving first loses within it; m* are the misere twins;
// esw/eel are the stopper-win and escaper-loss probabilities.
struct TruncatedValues {
    int depth = 0;
    std::vector<double> nw1, nw2, nl1, nl2;
    std::vector<double> mw1, mw2, ml1, ml2;
    std::vector<double> esw, eel;
};

inline TruncatedValues truncated_values(const ModelSpec& spec, int depth) {
    if (depth < 0) throw spec_error("truncation depth must be non-negative");
    int m = spec.m;
    auto [av, bv] = alpha_beta(spec);
    const std::vector<double>&a = av.values, &b = bv.values;
    TruncatedValues v;
    v.depth = depth;
    auto zero = std::vector<double>(m, 0.0);
    v.nw1 = v.nw2 = v.nl1 = v.nl2 = zero;
    v.mw1 = v.mw2 = v.ml1 = v.ml2 = zero;
    v.esw = v.eel = zero;
    std::vector<double> t(m);
    auto flip = [&](const std::vector<double>& x) {
        for (int k = 0; k < m; ++k) t[k] = std::clamp(1.0 - x[k], 0.0, 1.0);
        return t;
    };
    for (int n = 0; n < depth; ++n) {
        TruncatedValues nx = v;
        for (int j = 0; j < m; ++j) {
            ColorSet s = spec.moves(j), c = spec.counter_moves(j);
            const OffspringLaw& law = spec.offspring[j];
            nx.nw1[j] = 1.0 - pgf_eval(law, s, flip(v.nl2));
            nx.nw2[j] = 1.0 - pgf_eval(law, c, flip(v.nl1));
            nx.nl1[j] = pgf_eval(law, s, v.nw2);
            nx.nl2[j] = pgf_eval(law, c, v.nw1);
            nx.mw1[j] = std::clamp(a[j] + 1.0 - pgf_eval(law, s, flip(v.ml2)), 0.0, 1.0);
            nx.mw2[j] = std::clamp(b[j] + 1.0 - pgf_eval(law, c, flip(v.ml1)), 0.0, 1.0);
            nx.ml1[j] = std::clamp(pgf_eval(law, s, v.mw2) - a[j], 0.0, 1.0);
            nx.ml2[j] = std::clamp(pgf_eval(law, c, v.mw1) - b[j], 0.0, 1.0);
            nx.esw[j] = std::clamp(a[j] + 1.0 - pgf_eval(law, s, flip(v.eel)), 0.0, 1.0);
            nx.eel[j] = pgf_eval(law, c, v.esw);
        }
        v = std::move(nx);
    }
    return v;
}

}  // namespace gwgames
