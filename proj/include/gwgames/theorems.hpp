#pragma once

// Checkable structure results: dominance of the escape game over the normal
// and misere games, explicit lower-bound chains, draw/loss orderings under
// closed-form hypotheses, a spectral criterion for escaper survival, and a
// continuity probe for the outcome vectors under law perturbations.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fixedpoint.hpp"
#include "model.hpp"
#include "simulate.hpp"

namespace gwgames {

struct InequalityCheck {
    std::string name;   // which inequality, e.g. "nw1<=esw"
    int color = 0;      // 0-indexed
    double lhs = 0.0, rhs = 0.0;
    bool hypothesis_met = true;      // false rows are reported, not judged
    bool derived_by_symmetry = false;

    double margin() const { return rhs - lhs; }
    bool holds(double slack = 1e-9) const { return !hypothesis_met || margin() >= -slack; }
};

struct ComparisonReport {
    std::vector<InequalityCheck> checks;

    double min_margin() const {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& c : checks)
            if (c.hypothesis_met) worst = std::min(worst, c.margin());
        return worst;
    }
    bool all_hold(double slack = 1e-9) const {
        for (const auto& c : checks)
            if (!c.holds(slack)) return false;
        return true;
    }
};

// escape-game values dominate their normal and misere counterparts:
// nw1 <= esw, nl2 <= eel, mw1 <= esw, ml2 <= eel per color
inline ComparisonReport check_escape_dominance(const ModelSpec& spec, const OutcomeTable& out) {
    const auto& esw = out.row(GameKind::Escape, FirstMover::PlayerOne).win;
    const auto& eel = out.row(GameKind::Escape, FirstMover::PlayerTwo).lose;
    ComparisonReport rep;
    for (int j = 0; j < spec.m; ++j) {
        rep.checks.push_back({"nw1<=esw", j, out.row(GameKind::Normal, FirstMover::PlayerOne).win[j], esw[j]});
        rep.checks.push_back({"nl2<=eel", j, out.row(GameKind::Normal, FirstMover::PlayerTwo).lose[j], eel[j]});
        rep.checks.push_back({"mw1<=esw", j, out.row(GameKind::Misere, FirstMover::PlayerOne).win[j], esw[j]});
        rep.checks.push_back({"ml2<=eel", j, out.row(GameKind::Misere, FirstMover::PlayerTwo).lose[j], eel[j]});
    }
    return rep;
}

namespace detail {

// chain value alpha_j + min*(1-alpha_j) + sum_k (w_k - min) dG_k evaluated at 1-w
inline double chain_middle(const ModelSpec& spec, int j, ColorSet s, double stuck,
                           const std::vector<double>& w) {
    double lo = 1.0;
    for (int k = 0; k < spec.m; ++k)
        if (set_contains(s, k)) lo = std::min(lo, w[k]);
    std::vector<double> point(spec.m, 1.0);
    for (int k = 0; k < spec.m; ++k)
        if (set_contains(s, k)) point[k] = 1.0 - w[k];
    double acc = stuck + lo * (1.0 - stuck);
    for (int k = 0; k < spec.m; ++k)
        if (set_contains(s, k))
            acc += (w[k] - lo) * pgf_partial(spec.offspring[j], s, k, point);
    return acc;
}

}  // namespace detail

// two-sided sandwich bounds: each of esw, mw1 (over the first player's sets)
// and mw2 (over the second player's sets) is at least an explicit expression,
// which is in turn at least the corresponding minimum opposing loss
inline ComparisonReport check_lower_bound_chains(const ModelSpec& spec, const OutcomeTable& out) {
    auto [av, bv] = alpha_beta(spec);
    const auto& esw = out.row(GameKind::Escape, FirstMover::PlayerOne).win;
    const auto& eel = out.row(GameKind::Escape, FirstMover::PlayerTwo).lose;
    const auto& mw1 = out.row(GameKind::Misere, FirstMover::PlayerOne).win;
    const auto& ml2 = out.row(GameKind::Misere, FirstMover::PlayerTwo).lose;
    const auto& mw2 = out.row(GameKind::Misere, FirstMover::PlayerTwo).win;
    const auto& ml1 = out.row(GameKind::Misere, FirstMover::PlayerOne).lose;
    ComparisonReport rep;
    auto add_chain = [&](const char* tag, int j, double top, ColorSet s, double stuck,
                         const std::vector<double>& w) {
        double lo = 1.0;
        for (int k = 0; k < spec.m; ++k)
            if (set_contains(s, k)) lo = std::min(lo, w[k]);
        double mid = detail::chain_middle(spec, j, s, stuck, w);
        rep.checks.push_back({std::string(tag) + ".upper", j, mid, top});
        rep.checks.push_back({std::string(tag) + ".lower", j, lo, mid});
    };
    for (int j = 0; j < spec.m; ++j) {
        add_chain("esw", j, esw[j], spec.moves(j), av.values[j], eel);
        add_chain("mw1", j, mw1[j], spec.moves(j), av.values[j], ml2);
        add_chain("mw2", j, mw2[j], spec.counter_moves(j), bv.values[j], ml1);
    }
    return rep;
}

// Draw/loss orderings between the normal and misere games under pgf-level
// hypotheses: when alpha_j is below the beta-weighted single-child mass for
// every j, first-player losses order as nl1 <= ml1; when alpha_j is above the
// beta-weighted mean, wins order as nw1 <= mw1. Swapping the roles of the two
// players (alpha with beta, move sets with counter-move sets) gives the
// second-player versions.
inline ComparisonReport check_game_orderings(const ModelSpec& spec, const OutcomeTable& out) {
    auto [av, bv] = alpha_beta(spec);
    int m = spec.m;
    std::vector<double> zeros(m, 0.0);
    ComparisonReport rep;

    auto run_side = [&](bool p1_side) {
        const std::vector<double>& stuck = p1_side ? av.values : bv.values;
        const std::vector<double>& other = p1_side ? bv.values : av.values;
        bool loss_hyp = true, win_hyp = true;
        for (int j = 0; j < m; ++j) {
            ColorSet s = p1_side ? spec.moves(j) : spec.counter_moves(j);
            double single = 0.0, mean = 0.0;
            auto mu = mean_vector(spec.offspring[j]);
            for (int i = 0; i < m; ++i) {
                if (!set_contains(s, i)) continue;
                single += other[i] * pgf_partial(spec.offspring[j], s, i, zeros);
                mean += other[i] * mu[i];
            }
            if (!(stuck[j] <= single)) loss_hyp = false;
            if (!(stuck[j] >= mean)) win_hyp = false;
        }
        FirstMover f = p1_side ? FirstMover::PlayerOne : FirstMover::PlayerTwo;
        const char* who = p1_side ? "1" : "2";
        const auto& nl = out.row(GameKind::Normal, f).lose;
        const auto& ml = out.row(GameKind::Misere, f).lose;
        const auto& nw = out.row(GameKind::Normal, f).win;
        const auto& mw = out.row(GameKind::Misere, f).win;
        for (int j = 0; j < m; ++j) {
            InequalityCheck loss{std::string("nl") + who + "<=ml" + who, j, nl[j], ml[j]};
            loss.hypothesis_met = loss_hyp;
            loss.derived_by_symmetry = !p1_side;
            rep.checks.push_back(loss);
            InequalityCheck win{std::string("nw") + who + "<=mw" + who, j, nw[j], mw[j]};
            win.hypothesis_met = win_hyp;
            win.derived_by_symmetry = !p1_side;
            rep.checks.push_back(win);
        }
    };
    run_side(true);
    run_side(false);
    return rep;
}

// spectral radius of a non-negative matrix by normalized repeated squaring
// (Gelfand's formula with the max row-sum norm)
inline double spectral_radius(std::vector<std::vector<double>> mat) {
    int n = (int)mat.size();
    if (n == 0) return 0.0;
    for (const auto& row : mat) {
        if ((int)row.size() != n) throw spec_error("spectral radius needs a square matrix");
        for (double v : row)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw spec_error("spectral radius needs finite non-negative entries");
    }
    auto norm = [&](const std::vector<std::vector<double>>& a) {
        double worst = 0.0;
        for (const auto& row : a) {
            double s = 0.0;
            for (double v : row) s += v;
            worst = std::max(worst, s);
        }
        return worst;
    };
    double log_scale = 0.0;
    double weight = 1.0;  // current power of the matrix is 2^k; norm^(1/2^k)
    for (int k = 0; k < 60; ++k) {
        double nm = norm(mat);
        if (nm == 0.0) return 0.0;
        log_scale += weight * std::log(nm);
        weight *= 0.5;
        // normalize, then square
        std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                double v = mat[i][l] / nm;
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) next[i][j] += v * mat[l][j] / nm;
            }
        mat = std::move(next);
    }
    log_scale += weight * std::log(std::max(norm(mat), 1e-300));
    return std::exp(log_scale);
}

// Perron root of a non-negative 2x2 matrix in closed form
inline double spectral_radius_2x2(double a, double b, double c, double d) {
    double tr = a + d;
    double disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
    return 0.5 * (tr + disc);
}

// Sufficient criterion for the escaper to survive with positive probability:
// choose one permissible reply color f(i) per color i, weight the counter-move
// mean m_{i,k} by the chance gamma_{k,f(k)} that color k has exactly one
// permissible child and it has color f(k); if some choice of f makes the
// resulting matrix supercritical, eew > 0 for every root color.
struct SurvivalCriterion {
    std::vector<int> reply;                       // best f, reply[i] in moves(i)
    std::vector<std::vector<double>> single_move; // gamma[i][j] for j in moves(i), else 0
    std::vector<std::vector<double>> matrix;      // weighted mean matrix for the best f
    double rho = 0.0;                             // its spectral radius
    bool fires = false;                           // rho > 1 strictly
    long long candidates = 0;
};

inline SurvivalCriterion survival_criterion(const ModelSpec& spec, long long cap = 1000000) {
    int m = spec.m;
    std::vector<double> zeros(m, 0.0);
    auto means = mean_matrix(spec);
    std::vector<std::vector<double>> gamma(m, std::vector<double>(m, 0.0));
    std::vector<std::vector<int>> choices(m);
    long long total = 1;
    for (int i = 0; i < m; ++i) {
        ColorSet s = spec.moves(i);
        for (int j = 0; j < m; ++j)
            if (set_contains(s, j)) {
                gamma[i][j] = pgf_partial(spec.offspring[i], s, j, zeros);
                choices[i].push_back(j);
            }
        total *= (long long)choices[i].size();
        if (total > cap)
            throw spec_error("too many reply functions to enumerate (cap " +
                             std::to_string(cap) + ")");
    }

    SurvivalCriterion best;
    best.single_move = gamma;
    best.candidates = total;
    std::vector<int> pick(m, 0);
    std::vector<int> f(m);
    for (long long c = 0; c < total; ++c) {
        for (int i = 0; i < m; ++i) f[i] = choices[i][pick[i]];
        std::vector<std::vector<double>> mat(m, std::vector<double>(m, 0.0));
        for (int i = 0; i < m; ++i) {
            ColorSet counter = spec.counter_moves(i);
            for (int k = 0; k < m; ++k)
                if (set_contains(counter, k)) mat[i][f[k]] += means[i][k] * gamma[k][f[k]];
        }
        double rho = spectral_radius(mat);
        if (best.reply.empty() || rho > best.rho) {
            best.reply = f;
            best.matrix = mat;
            best.rho = rho;
        }
        for (int i = m - 1; i >= 0; --i) {
            if (++pick[i] < (int)choices[i].size()) break;
            pick[i] = 0;
        }
    }
    best.fires = best.rho > 1.0;
    return best;
}

// Equivalence between positive escaper survival (all colors) and positive
// stopper loss (all colors); meaningful when every alpha_j < 1.
struct EquivalenceReport {
    bool hypothesis_met = false;   // alpha_j < 1 for all j
    double min_eew = 0.0, min_esl = 0.0;
    double tau = 0.0;              // positivity threshold used
    enum class State { Zero, Positive, Inconclusive } eew_state, esl_state;
    enum class Verdict { Consistent, Inconsistent, Inconclusive, HypothesisUnmet } verdict;
};

inline EquivalenceReport eew_esl_equivalence(const ModelSpec& spec, const OutcomeTable& out,
                                             double tol = 1e-12) {
    auto [av, bv] = alpha_beta(spec);
    (void)bv;
    EquivalenceReport rep;
    rep.hypothesis_met = true;
    for (double a : av.values)
        if (!(a < 1.0)) rep.hypothesis_met = false;
    rep.tau = 10.0 * tol;
    const auto& eew = out.row(GameKind::Escape, FirstMover::PlayerTwo).win;
    const auto& esl = out.row(GameKind::Escape, FirstMover::PlayerOne).lose;
    rep.min_eew = *std::min_element(eew.begin(), eew.end());
    rep.min_esl = *std::min_element(esl.begin(), esl.end());
    auto classify = [&](double v) {
        if (v <= rep.tau) return EquivalenceReport::State::Zero;
        if (v >= 100.0 * rep.tau) return EquivalenceReport::State::Positive;
        return EquivalenceReport::State::Inconclusive;
    };
    rep.eew_state = classify(rep.min_eew);
    rep.esl_state = classify(rep.min_esl);
    if (!rep.hypothesis_met)
        rep.verdict = EquivalenceReport::Verdict::HypothesisUnmet;
    else if (rep.eew_state == EquivalenceReport::State::Inconclusive ||
             rep.esl_state == EquivalenceReport::State::Inconclusive)
        rep.verdict = EquivalenceReport::Verdict::Inconclusive;
    else if (rep.eew_state == rep.esl_state)
        rep.verdict = EquivalenceReport::Verdict::Consistent;
    else
        rep.verdict = EquivalenceReport::Verdict::Inconsistent;
    return rep;
}

// sum over n >= 1 of n a^(n-1) = 1/(1-a)^2, the slope weight in the pgf
// stability bound below
inline double geometric_series_slope(double a) {
    if (!(a >= 0.0) || !(a < 1.0)) throw spec_error("slope weight needs a in [0,1)");
    return 1.0 / ((1.0 - a) * (1.0 - a));
}

// |G_a(x) - G_b(y)| <= 2 tv(a,b) + restricted_mean(a) * max_k |x_k - y_k|
struct GapBound {
    double gap = 0.0;    // |G_a(x) - G_b(y)|
    double bound = 0.0;
    double margin() const { return bound - gap; }
};

inline GapBound pgf_gap_bound(const OffspringLaw& a, const OffspringLaw& b, ColorSet s,
                              const std::vector<double>& x, const std::vector<double>& y) {
    GapBound gb;
    gb.gap = std::fabs(pgf_eval(a, s, x) - pgf_eval(b, s, y));
    double diff = 0.0;
    for (int k = 0; k < a.colors; ++k)
        if (set_contains(s, k)) diff = std::max(diff, std::fabs(x[k] - y[k]));
    gb.bound = 2.0 * law_tv_distance(a, b) + restricted_mean(a, s) * diff;
    return gb;
}

// qualitative features of the law that the stability results condition on
struct LawClassReport {
    std::vector<double> alpha, beta;
    std::vector<double> move_mean, counter_mean;      // expected permissible / counter children
    bool alpha_all_positive = true, beta_all_positive = true;
    bool move_mean_finite = true, counter_mean_finite = true;
    bool alpha_strictly_below_crossing = true;  // G_{j,moves}(beta) > alpha_j for all j
    bool beta_strictly_below_crossing = true;   // G_{j,counter}(alpha) > beta_j for all j
};

inline LawClassReport law_class_report(const ModelSpec& spec) {
    LawClassReport rep;
    auto [av, bv] = alpha_beta(spec);
    rep.alpha = av.values;
    rep.beta = bv.values;
    rep.move_mean.resize(spec.m);
    rep.counter_mean.resize(spec.m);
    for (int j = 0; j < spec.m; ++j) {
        rep.move_mean[j] = restricted_mean(spec.offspring[j], spec.moves(j));
        rep.counter_mean[j] = restricted_mean(spec.offspring[j], spec.counter_moves(j));
        if (!(rep.alpha[j] > 0.0)) rep.alpha_all_positive = false;
        if (!(rep.beta[j] > 0.0)) rep.beta_all_positive = false;
        if (!std::isfinite(rep.move_mean[j])) rep.move_mean_finite = false;
        if (!std::isfinite(rep.counter_mean[j])) rep.counter_mean_finite = false;
        if (!(pgf_eval(spec.offspring[j], spec.moves(j), rep.beta) > rep.alpha[j]))
            rep.alpha_strictly_below_crossing = false;
        if (!(pgf_eval(spec.offspring[j], spec.counter_moves(j), rep.alpha) > rep.beta[j]))
            rep.beta_strictly_below_crossing = false;
    }
    return rep;
}

// Empirical continuity probe: random mass transfers of total-variation size at
// most eps applied to each offspring law, same transfer directions across eps
// values (they only scale), reporting the worst outcome-vector deltas.
struct ProbeReport {
    double eps = 0.0;
    int trials = 0;
    double max_d0 = 0.0;  // largest realized law distance
    // worst absolute change per outcome family, indexed like the names below
    std::array<double, 10> max_delta{};
    LawClassReport base_class;
};

inline const std::array<const char*, 10>& probe_family_names() {
    static const std::array<const char*, 10> names = {
        "nw1", "nl1", "nw2", "nl2", "mw1", "ml1", "mw2", "ml2", "esw", "eel"};
    return names;
}

namespace detail {

inline ModelSpec perturb_tables(const ModelSpec& spec, double eps, std::uint64_t seed,
                                int trial) {
    std::vector<OffspringLaw> laws;
    for (int j = 0; j < spec.m; ++j) {
        const OffspringLaw& law = spec.offspring[j];
        RngStream rng(seed, (std::uint64_t)trial * 1024 + j);
        std::vector<TableEntry> rows = law.entries;
        size_t donor = (size_t)(rng.next_unit() * rows.size());
        donor = std::min(donor, rows.size() - 1);
        double scale = rng.next_unit();
        size_t target;
        if (rows.size() == 1) {
            // single-row law: route mass to the row plus one extra child
            TableEntry extra = rows[0];
            int color = (int)(rng.next_unit() * spec.m);
            extra.counts[std::min(color, spec.m - 1)] += 1;
            extra.prob = 0.0;
            rows.push_back(extra);
            target = rows.size() - 1;
        } else {
            target = (size_t)(rng.next_unit() * (rows.size() - 1));
            target = std::min(target, rows.size() - 2);
            if (target >= donor) ++target;
        }
        double delta = std::min(eps * scale, rows[donor].prob);
        rows[donor].prob -= delta;
        rows[target].prob += delta;
        laws.push_back(OffspringLaw::table(spec.m, std::move(rows)));
    }
    return ModelSpec::create(spec.m, spec.root_law, std::move(laws), spec.permissible);
}

}  // namespace detail

inline ProbeReport continuity_probe(const ModelSpec& spec, double eps, int trials,
                                    std::uint64_t seed, double tol = 1e-12) {
    for (const auto& law : spec.offspring)
        if (law.kind != OffspringLaw::Kind::Table)
            throw spec_error("continuity probe needs table laws (mass transfers)");
    if (!(eps >= 0.0) || eps > 1.0) throw spec_error("probe size must lie in [0,1]");
    if (trials <= 0) throw spec_error("probe needs at least one trial");

    ProbeReport rep;
    rep.eps = eps;
    rep.trials = trials;
    rep.base_class = law_class_report(spec);
    OutcomeTable base = solve_outcomes(spec, tol);
    auto families = [&](const OutcomeTable& t) {
        return std::array<const std::vector<double>*, 10>{
            &t.row(GameKind::Normal, FirstMover::PlayerOne).win,
            &t.row(GameKind::Normal, FirstMover::PlayerOne).lose,
            &t.row(GameKind::Normal, FirstMover::PlayerTwo).win,
            &t.row(GameKind::Normal, FirstMover::PlayerTwo).lose,
            &t.row(GameKind::Misere, FirstMover::PlayerOne).win,
            &t.row(GameKind::Misere, FirstMover::PlayerOne).lose,
            &t.row(GameKind::Misere, FirstMover::PlayerTwo).win,
            &t.row(GameKind::Misere, FirstMover::PlayerTwo).lose,
            &t.row(GameKind::Escape, FirstMover::PlayerOne).win,
            &t.row(GameKind::Escape, FirstMover::PlayerTwo).lose};
    };
    auto base_fam = families(base);
    for (int t = 0; t < trials; ++t) {
        ModelSpec shifted = detail::perturb_tables(spec, eps, seed, t);
        rep.max_d0 = std::max(rep.max_d0, d0_distance(spec, shifted));
        OutcomeTable out = solve_outcomes(shifted, tol);
        auto fam = families(out);
        for (int f = 0; f < 10; ++f)
            for (int j = 0; j < spec.m; ++j)
                rep.max_delta[f] = std::max(rep.max_delta[f],
                                            std::fabs((*fam[f])[j] - (*base_fam[f])[j]));
    }
    return rep;
}

}  // namespace gwgames
