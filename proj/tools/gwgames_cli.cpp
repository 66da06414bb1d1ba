// Command-line front end: solve, truncate, sample, montecarlo, binary,
// poisson, check, survive, probe. Each report starts with a machine-readable
// "key = value" section, then "---" and a human-readable table. Output is
// deterministic for fixed argv.

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwgames/casestudies.hpp"
#include "gwgames/fixedpoint.hpp"
#include "gwgames/model.hpp"
#include "gwgames/simulate.hpp"
#include "gwgames/spec_io.hpp"
#include "gwgames/theorems.hpp"

using namespace gwgames;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Report {
    std::string machine, human;

    void kv(const std::string& key, const std::string& value) {
        machine += key + " = " + value + "\n";
    }
    void kv(const std::string& key, double value) { kv(key, fmt(value)); }
    void kv(const std::string& key, int value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, long value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, std::uint64_t value) { kv(key, std::to_string(value)); }
    void kv(const std::string& key, bool value) { kv(key, std::string(value ? "true" : "false")); }
    void line(const std::string& s) { human += s + "\n"; }

    void print() const {
        std::fputs(machine.c_str(), stdout);
        std::fputs("---\n", stdout);
        std::fputs(human.c_str(), stdout);
    }
};

const char* kOutcomePrefix[6][3] = {
    {"nw1", "nl1", "nd1"}, {"nw2", "nl2", "nd2"},
    {"mw1", "ml1", "md1"}, {"mw2", "ml2", "md2"},
    {"esw", "esl", "esd"}, {"eew", "eel", "eed"},
};

int row_index(GameKind k, FirstMover f) {
    int base = k == GameKind::Normal ? 0 : k == GameKind::Misere ? 2 : 4;
    return base + (f == FirstMover::PlayerTwo ? 1 : 0);
}

void emit_outcomes(Report& rep, const ModelSpec& spec, const OutcomeTable& table) {
    for (const auto& row : table.rows) {
        const char** names = kOutcomePrefix[row_index(row.kind, row.mover)];
        for (int j = 0; j < spec.m; ++j) {
            std::string c = "." + std::to_string(j + 1);
            rep.kv(names[0] + c, row.win[j]);
            rep.kv(names[1] + c, row.lose[j]);
            rep.kv(names[2] + c, row.draw[j]);
        }
    }
    for (const auto& row : table.rows) {
        std::string key = std::string("solver.") + game_name(row.kind) + "." + mover_name(row.mover);
        rep.kv(key + ".iterations", row.iterations);
        rep.kv(key + ".delta", row.delta);
        rep.kv(key + ".converged", row.converged);
    }
    rep.line("game    mover  color        win         lose         draw");
    for (const auto& row : table.rows) {
        for (int j = 0; j < spec.m; ++j) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%-7s %-6s %-5d %12s %12s %12s",
                          game_name(row.kind), mover_name(row.mover), j + 1,
                          fmt6(row.win[j]).c_str(), fmt6(row.lose[j]).c_str(),
                          fmt6(row.draw[j]).c_str());
            rep.line(buf);
        }
    }
}

struct CommonOpts {
    std::string spec_file;
    double tol = 1e-12;
    long max_iter = 1000000;
    bool dump = false;
};

// returns true when --dump-spec short-circuited the command
bool maybe_dump(const ModelSpec& spec, bool dump) {
    if (dump) std::fputs(dump_spec(spec).c_str(), stdout);
    return dump;
}

int cmd_solve(const CommonOpts& o) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    OutcomeTable table = solve_outcomes(spec, o.tol, o.max_iter);
    Report rep;
    rep.kv("command", std::string("solve"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("m", spec.m);
    rep.kv("tol", o.tol);
    rep.kv("max_iter", o.max_iter);
    emit_outcomes(rep, spec, table);
    rep.print();
    return 0;
}

int cmd_truncate(const CommonOpts& o, int depth) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    TruncatedValues v = truncated_values(spec, depth);
    Report rep;
    rep.kv("command", std::string("truncate"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("m", spec.m);
    rep.kv("depth", depth);
    const std::vector<double>* fam[10] = {&v.nw1, &v.nw2, &v.nl1, &v.nl2, &v.mw1,
                                          &v.mw2, &v.ml1, &v.ml2, &v.esw, &v.eel};
    const char* names[10] = {"nw1", "nw2", "nl1", "nl2", "mw1", "mw2", "ml1", "ml2", "esw", "eel"};
    for (int f = 0; f < 10; ++f)
        for (int j = 0; j < spec.m; ++j)
            rep.kv(std::string(names[f]) + "." + std::to_string(j + 1), (*fam[f])[j]);
    rep.line("value  color   probability (decided within " + std::to_string(depth) + " rounds)");
    for (int f = 0; f < 10; ++f)
        for (int j = 0; j < spec.m; ++j) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%-6s %-5d %12s", names[f], j + 1,
                          fmt6((*fam[f])[j]).c_str());
            rep.line(buf);
        }
    rep.print();
    return 0;
}

int cmd_sample(const CommonOpts& o, int depth, std::uint64_t seed, int root_color,
               double population_cap) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    if (root_color < 0 || root_color > spec.m)
        throw spec_error("--root-color must be 0 (root law) or a color in 1..m");
    SampledTree tree = sample_tree(spec, depth, seed, root_color - 1, population_cap);
    Report rep;
    rep.kv("command", std::string("sample"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("depth", depth);
    rep.kv("seed", seed);
    rep.kv("root_color", tree.vertices[0].color + 1);
    rep.kv("vertices", (long)tree.vertices.size());
    rep.kv("truncation_depth", tree.truncation_depth);
    rep.line("index parent depth color");
    for (size_t i = 0; i < tree.vertices.size(); ++i) {
        const TreeVertex& v = tree.vertices[i];
        rep.line(std::to_string(i) + " " + std::to_string(v.parent) + " " +
                 std::to_string(v.depth) + " " + std::to_string(v.color + 1));
    }
    rep.print();
    return 0;
}

GameKind parse_game(const std::string& name) {
    if (name == "normal") return GameKind::Normal;
    if (name == "misere") return GameKind::Misere;
    if (name == "escape") return GameKind::Escape;
    throw spec_error("unknown game: " + name);
}

int cmd_montecarlo(const CommonOpts& o, const std::string& game, int mover, int root_color,
                   int depth, long samples, std::uint64_t seed, double population_cap) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    GameKind kind = parse_game(game);
    if (mover != 1 && mover != 2) throw spec_error("--mover must be 1 or 2");
    if (root_color < 1 || root_color > spec.m) throw spec_error("--root-color out of range");
    FirstMover first = mover == 1 ? FirstMover::PlayerOne : FirstMover::PlayerTwo;
    MonteCarloResult mc =
        monte_carlo(spec, kind, first, root_color - 1, depth, samples, seed, population_cap);
    TruncatedValues v = truncated_values(spec, depth);
    int j = root_color - 1;
    double tw = 0.0, tl = 0.0;
    switch (kind) {
        case GameKind::Normal:
            tw = mover == 1 ? v.nw1[j] : v.nw2[j];
            tl = mover == 1 ? v.nl1[j] : v.nl2[j];
            break;
        case GameKind::Misere:
            tw = mover == 1 ? v.mw1[j] : v.mw2[j];
            tl = mover == 1 ? v.ml1[j] : v.ml2[j];
            break;
        case GameKind::Escape:
            tw = mover == 1 ? v.esw[j] : 0.0;
            tl = mover == 1 ? 0.0 : v.eel[j];
            break;
    }
    Report rep;
    rep.kv("command", std::string("montecarlo"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("game", game);
    rep.kv("mover", mover);
    rep.kv("root_color", root_color);
    rep.kv("depth", depth);
    rep.kv("samples", mc.samples);
    rep.kv("seed", seed);
    rep.kv("win_hat", mc.win_hat);
    rep.kv("lose_hat", mc.lose_hat);
    rep.kv("draw_hat", mc.draw_hat);
    rep.kv("win_stderr", mc.win_stderr);
    rep.kv("lose_stderr", mc.lose_stderr);
    rep.kv("truncated.win", tw);
    rep.kv("truncated.lose", tl);
    auto zscore = [](double hat, double truth, double n) {
        double sigma = std::sqrt(truth * (1.0 - truth) / n);
        if (sigma == 0.0) return hat == truth ? 0.0 : std::numeric_limits<double>::infinity();
        return (hat - truth) / sigma;
    };
    rep.kv("z.win", zscore(mc.win_hat, tw, (double)mc.samples));
    rep.kv("z.lose", zscore(mc.lose_hat, tl, (double)mc.samples));
    if (kind == GameKind::Escape) {
        // no finite-horizon point estimate exists; the true first-mover win
        // probability lies in [win-certified, 1 - lose-certified]
        rep.kv("escape.bracket.lo", tw);
        rep.kv("escape.bracket.hi", 1.0 - tl);
    }
    rep.line("estimate      value       stderr    truncated");
    char buf[128];
    std::snprintf(buf, sizeof buf, "win    %12s %12s %12s", fmt6(mc.win_hat).c_str(),
                  fmt6(mc.win_stderr).c_str(), fmt6(tw).c_str());
    rep.line(buf);
    std::snprintf(buf, sizeof buf, "lose   %12s %12s %12s", fmt6(mc.lose_hat).c_str(),
                  fmt6(mc.lose_stderr).c_str(), fmt6(tl).c_str());
    rep.line(buf);
    std::snprintf(buf, sizeof buf, "draw   %12s", fmt6(mc.draw_hat).c_str());
    rep.line(buf);
    rep.print();
    return 0;
}

int cmd_binary(const BinaryParams& params, bool dump) {
    ModelSpec spec = binary_to_spec(params);
    if (maybe_dump(spec, dump)) return 0;
    BinaryVerdict verdict = binary_verdict(params);
    OutcomeTable table = solve_outcomes(spec, 1e-13, 2000000);
    Report rep;
    rep.kv("command", std::string("binary"));
    rep.kv("p0", params.p0);
    rep.kv("pbb", params.pbb);
    rep.kv("prr", params.prr);
    rep.kv("pbr", params.pbr);
    rep.kv("q0", params.q0);
    rep.kv("qbb", params.qbb);
    rep.kv("qrr", params.qrr);
    rep.kv("qbr", params.qbr);
    rep.kv("all_one", verdict.all_one);
    const char* color_tag[2] = {"b", "r"};
    for (int mover = 0; mover < 2; ++mover)
        for (int c = 0; c < 2; ++c) {
            std::string suffix = std::to_string(mover + 1) + "." + color_tag[c];
            rep.kv("verdict.nd" + suffix, verdict.draw_normal[mover][c]);
            rep.kv("verdict.md" + suffix, verdict.draw_misere[mover][c]);
        }
    for (int c = 0; c < 2; ++c) {
        rep.kv(std::string("verdict.esl.") + color_tag[c], verdict.stopper_loss[c]);
        rep.kv(std::string("verdict.eew.") + color_tag[c], verdict.escaper_win[c]);
    }
    for (int mover = 0; mover < 2; ++mover) {
        FirstMover f = mover == 0 ? FirstMover::PlayerOne : FirstMover::PlayerTwo;
        for (int c = 0; c < 2; ++c) {
            std::string suffix = std::to_string(mover + 1) + "." + color_tag[c];
            rep.kv("solved.nd" + suffix, table.row(GameKind::Normal, f).draw[c]);
            rep.kv("solved.md" + suffix, table.row(GameKind::Misere, f).draw[c]);
        }
    }
    for (int c = 0; c < 2; ++c) {
        rep.kv(std::string("solved.esl.") + color_tag[c],
               table.row(GameKind::Escape, FirstMover::PlayerOne).lose[c]);
        rep.kv(std::string("solved.eew.") + color_tag[c],
               table.row(GameKind::Escape, FirstMover::PlayerTwo).win[c]);
    }
    rep.line(verdict.all_one ? "draw=1 for all games/colors" : "draw=0 for all games/colors");
    rep.print();
    return 0;
}

int cmd_poisson(double lambda, double pb, double qb, int grid, bool dump) {
    PoissonParams params{lambda, pb, qb};
    ModelSpec spec = poisson_to_spec(params);
    if (maybe_dump(spec, dump)) return 0;
    PoissonConditions conds = poisson_conditions(params);
    OutcomeTable table = solve_outcomes(spec, 1e-13, 2000000);
    Report rep;
    rep.kv("command", std::string("poisson"));
    rep.kv("lambda", params.lambda);
    rep.kv("pb", params.pb);
    rep.kv("qb", params.qb);
    rep.kv("grid", grid);
    rep.kv("cond.all_zero", conds.all_zero);
    const char* color_tag[2] = {"b", "r"};
    for (const auto& row : conds.rows) {
        std::string suffix = std::string(row.mover == FirstMover::PlayerOne ? "1" : "2") +
                             color_tag[row.color];
        rep.kv("cond.normal." + suffix, row.normal_draw_zero);
        rep.kv("cond.misere." + suffix, row.misere_draw_zero);
        if (row.stopper_loss_zero.has_value())
            rep.kv("cond.escape." + suffix, *row.stopper_loss_zero);
        rep.kv("cond.derived." + suffix, row.derived_by_symmetry);
    }
    for (const auto& row : conds.rows) {
        std::string suffix = std::string(row.mover == FirstMover::PlayerOne ? "1" : "2") +
                             color_tag[row.color];
        ScalarFixedPoints fp = scalar_fixed_points(poisson_maps_for(params, row.mover, row.color), grid);
        rep.kv("fp.count." + suffix, (int)fp.roots.size());
        rep.kv("fp.min." + suffix, fp.min_fp);
        rep.kv("fp.max." + suffix, fp.max_fp);
        rep.kv("fp.grid_ok." + suffix, fp.grid_ok);
        for (size_t i = 0; i < fp.roots.size(); ++i)
            rep.kv("fp.root." + suffix + "." + std::to_string(i + 1), fp.roots[i].x);
        rep.kv("nd.scalar." + suffix, scalar_draw_width(fp));
        rep.kv("nd.vector." + suffix,
               table.row(GameKind::Normal, row.mover).draw[row.color]);
        rep.kv("md.vector." + suffix,
               table.row(GameKind::Misere, row.mover).draw[row.color]);
    }
    for (int c = 0; c < 2; ++c) {
        rep.kv(std::string("esl.vector.") + color_tag[c],
               table.row(GameKind::Escape, FirstMover::PlayerOne).lose[c]);
        rep.kv(std::string("eew.vector.") + color_tag[c],
               table.row(GameKind::Escape, FirstMover::PlayerTwo).win[c]);
    }
    rep.line("small-product condition (all draw and stopper-loss probabilities 0): " +
             std::string(conds.all_zero ? "true" : "false"));
    rep.line("row   normal misere escape  nd(scalar)   nd(vector)");
    for (const auto& row : conds.rows) {
        std::string suffix = std::string(row.mover == FirstMover::PlayerOne ? "1" : "2") +
                             color_tag[row.color];
        ScalarFixedPoints fp = scalar_fixed_points(poisson_maps_for(params, row.mover, row.color), grid);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-5s %-6s %-6s %-7s %12s %12s", suffix.c_str(),
                      row.normal_draw_zero ? "true" : "false",
                      row.misere_draw_zero ? "true" : "false",
                      row.stopper_loss_zero.has_value()
                          ? (*row.stopper_loss_zero ? "true" : "false")
                          : "-",
                      fmt6(scalar_draw_width(fp)).c_str(),
                      fmt6(table.row(GameKind::Normal, row.mover).draw[row.color]).c_str());
        rep.line(buf);
    }
    rep.print();
    return 0;
}

void emit_comparison(Report& rep, const std::string& block, const ComparisonReport& cmp) {
    for (const auto& c : cmp.checks) {
        std::string key = block + "." + c.name + "." + std::to_string(c.color + 1);
        rep.kv(key + ".lhs", c.lhs);
        rep.kv(key + ".rhs", c.rhs);
        rep.kv(key + ".margin", c.margin());
        if (!c.hypothesis_met)
            rep.kv(key + ".verdict", std::string("hypothesis-unmet"));
        else
            rep.kv(key + ".verdict", std::string(c.holds() ? "pass" : "fail"));
        if (c.derived_by_symmetry) rep.kv(key + ".derived", true);
    }
    rep.kv(block + ".min_margin", cmp.min_margin());
    rep.kv(block + ".all_hold", cmp.all_hold());
}

int cmd_check(const CommonOpts& o) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    OutcomeTable table = solve_outcomes(spec, o.tol, o.max_iter);
    ComparisonReport dom = check_escape_dominance(spec, table);
    ComparisonReport chain = check_lower_bound_chains(spec, table);
    ComparisonReport ord = check_game_orderings(spec, table);
    Report rep;
    rep.kv("command", std::string("check"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("m", spec.m);
    rep.kv("tol", o.tol);
    emit_comparison(rep, "dominance", dom);
    emit_comparison(rep, "chain", chain);
    emit_comparison(rep, "ordering", ord);
    bool all = dom.all_hold() && chain.all_hold() && ord.all_hold();
    rep.kv("check.all_hold", all);
    auto table_block = [&](const char* title, const ComparisonReport& cmp) {
        rep.line(title);
        for (const auto& c : cmp.checks) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %-12s color %d  lhs %12s  rhs %12s  %s",
                          c.name.c_str(), c.color + 1, fmt6(c.lhs).c_str(), fmt6(c.rhs).c_str(),
                          !c.hypothesis_met ? "hypothesis-unmet"
                                            : (c.holds() ? "pass" : "fail"));
            rep.line(buf);
        }
    };
    table_block("escape dominates normal/misere:", dom);
    table_block("lower-bound chains:", chain);
    table_block("normal-vs-misere orderings:", ord);
    rep.print();
    if (!all) throw consistency_error("an inequality with met hypothesis failed");
    return 0;
}

int cmd_survive(const CommonOpts& o, long long cap) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    SurvivalCriterion crit = survival_criterion(spec, cap);
    OutcomeTable table = solve_outcomes(spec, o.tol, o.max_iter);
    EquivalenceReport equiv = eew_esl_equivalence(spec, table, o.tol);
    Report rep;
    rep.kv("command", std::string("survive"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("m", spec.m);
    rep.kv("rho", crit.rho);
    rep.kv("fires", crit.fires);
    rep.kv("criterion", std::string(crit.fires ? "fires" : "silent"));
    rep.kv("candidates", crit.candidates);
    for (int i = 0; i < spec.m; ++i)
        rep.kv("reply." + std::to_string(i + 1), crit.reply[i] + 1);
    for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.m; ++j) {
            std::string ij = "." + std::to_string(i + 1) + "." + std::to_string(j + 1);
            rep.kv("gamma" + ij, crit.single_move[i][j]);
            rep.kv("matrix" + ij, crit.matrix[i][j]);
        }
    const char* verdicts[] = {"consistent", "inconsistent", "inconclusive", "hypothesis-unmet"};
    rep.kv("equiv.verdict", std::string(verdicts[(int)equiv.verdict]));
    rep.kv("equiv.min_eew", equiv.min_eew);
    rep.kv("equiv.min_esl", equiv.min_esl);
    rep.kv("equiv.tau", equiv.tau);
    if (crit.fires)
        rep.line("criterion fires (rho = " + fmt6(crit.rho) +
                 " > 1): escaper survives with positive probability from every root color");
    else
        rep.line("criterion silent (rho = " + fmt6(crit.rho) + " <= 1)");
    rep.line("min escaper-survival " + fmt6(equiv.min_eew) + ", min stopper-loss " +
             fmt6(equiv.min_esl) + " (" + verdicts[(int)equiv.verdict] + ")");
    rep.print();
    return 0;
}

int cmd_probe(const CommonOpts& o, double eps, int trials, std::uint64_t seed) {
    ModelSpec spec = load_spec_file(o.spec_file);
    if (maybe_dump(spec, o.dump)) return 0;
    ProbeReport probe = continuity_probe(spec, eps, trials, seed, o.tol);
    Report rep;
    rep.kv("command", std::string("probe"));
    rep.kv("spec.file", o.spec_file);
    rep.kv("eps", probe.eps);
    rep.kv("trials", probe.trials);
    rep.kv("seed", seed);
    rep.kv("max_d0", probe.max_d0);
    const auto& names = probe_family_names();
    for (int f = 0; f < 10; ++f)
        rep.kv(std::string("delta.") + names[f], probe.max_delta[f]);
    const LawClassReport& cls = probe.base_class;
    rep.kv("class.alpha_all_positive", cls.alpha_all_positive);
    rep.kv("class.beta_all_positive", cls.beta_all_positive);
    rep.kv("class.move_mean_finite", cls.move_mean_finite);
    rep.kv("class.counter_mean_finite", cls.counter_mean_finite);
    rep.kv("class.alpha_below_crossing", cls.alpha_strictly_below_crossing);
    rep.kv("class.beta_below_crossing", cls.beta_strictly_below_crossing);
    for (int j = 0; j < spec.m; ++j) {
        std::string c = "." + std::to_string(j + 1);
        rep.kv("class.alpha" + c, cls.alpha[j]);
        rep.kv("class.beta" + c, cls.beta[j]);
        rep.kv("class.move_mean" + c, cls.move_mean[j]);
        rep.kv("class.counter_mean" + c, cls.counter_mean[j]);
    }
    rep.line("worst outcome change over " + std::to_string(trials) + " perturbations of size <= " +
             fmt6(eps) + ":");
    for (int f = 0; f < 10; ++f)
        rep.line("  " + std::string(names[f]) + "  " + fmt6(probe.max_delta[f]));
    rep.print();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Games on colored branching trees: fixed-point solvers, simulation, checks"};
    app.require_subcommand(1);

    CommonOpts solve_o, trunc_o, sample_o, mc_o, check_o, survive_o, probe_o;
    int trunc_depth = 10;
    int sample_depth = 10, sample_root = 0;
    std::uint64_t sample_seed = 1;
    double sample_cap = 1e7;
    std::string mc_game = "normal";
    int mc_mover = 1, mc_root = 1, mc_depth = 30;
    long mc_samples = 100000;
    std::uint64_t mc_seed = 1;
    double mc_cap = 1e7;
    BinaryParams bin;
    bool bin_dump = false;
    double po_lambda = 1.0, po_pb = 0.5, po_qb = 0.5;
    int po_grid = 10000;
    bool po_dump = false;
    long long survive_cap = 1000000;
    double probe_eps = 1e-3;
    int probe_trials = 20;
    std::uint64_t probe_seed = 1;

    auto add_common = [](CLI::App* cmd, CommonOpts& o, bool with_tol = true) {
        cmd->add_option("--spec", o.spec_file, "model spec file (JSON)")->required();
        if (with_tol) {
            cmd->add_option("--tol", o.tol, "fixed-point tolerance");
            cmd->add_option("--max-iter", o.max_iter, "fixed-point iteration cap");
        }
        cmd->add_flag("--dump-spec", o.dump, "print the canonical spec and exit");
    };

    CLI::App* c_solve = app.add_subcommand("solve", "win/lose/draw table from the fixed points");
    add_common(c_solve, solve_o);

    CLI::App* c_trunc = app.add_subcommand("truncate", "values of the depth-limited games");
    add_common(c_trunc, trunc_o, false);
    c_trunc->add_option("--depth", trunc_depth, "number of rounds")->required();

    CLI::App* c_sample = app.add_subcommand("sample", "sample one tree and dump it");
    add_common(c_sample, sample_o, false);
    c_sample->add_option("--depth", sample_depth, "generations to sample");
    c_sample->add_option("--seed", sample_seed, "random seed");
    c_sample->add_option("--root-color", sample_root, "root color (0 = draw from root law)");
    c_sample->add_option("--population-cap", sample_cap, "expected-population guard");

    CLI::App* c_mc = app.add_subcommand("montecarlo", "estimate truncated values by simulation");
    add_common(c_mc, mc_o, false);
    c_mc->add_option("--game", mc_game, "normal | misere | escape");
    c_mc->add_option("--mover", mc_mover, "first mover, 1 or 2");
    c_mc->add_option("--root-color", mc_root, "root color, 1-indexed");
    c_mc->add_option("--depth", mc_depth, "rounds before the horizon");
    c_mc->add_option("--samples", mc_samples, "number of sampled trees");
    c_mc->add_option("--seed", mc_seed, "random seed");
    c_mc->add_option("--population-cap", mc_cap, "expected-population guard");

    CLI::App* c_bin = app.add_subcommand("binary", "two-color pair-offspring family verdict");
    c_bin->add_option("--p0", bin.p0, "blue: no children");
    c_bin->add_option("--pbb", bin.pbb, "blue: two blue children");
    c_bin->add_option("--prr", bin.prr, "blue: two red children");
    c_bin->add_option("--pbr", bin.pbr, "blue: one of each");
    c_bin->add_option("--q0", bin.q0, "red: no children");
    c_bin->add_option("--qbb", bin.qbb, "red: two blue children");
    c_bin->add_option("--qrr", bin.qrr, "red: two red children");
    c_bin->add_option("--qbr", bin.qbr, "red: one of each");
    c_bin->add_flag("--dump-spec", bin_dump, "print the canonical spec and exit");

    CLI::App* c_po = app.add_subcommand("poisson", "thinned-Poisson family analysis");
    c_po->add_option("--lambda", po_lambda, "mean offspring count")->required();
    c_po->add_option("--pb", po_pb, "blue child probability at blue vertices");
    c_po->add_option("--qb", po_qb, "blue child probability at red vertices");
    c_po->add_option("--grid", po_grid, "fixed-point scan grid");
    c_po->add_flag("--dump-spec", po_dump, "print the canonical spec and exit");

    CLI::App* c_check = app.add_subcommand("check", "dominance, chain and ordering inequalities");
    add_common(c_check, check_o);

    CLI::App* c_survive = app.add_subcommand("survive", "escaper-survival spectral criterion");
    add_common(c_survive, survive_o);
    c_survive->add_option("--cap", survive_cap, "reply-function enumeration cap");

    CLI::App* c_probe = app.add_subcommand("probe", "outcome stability under law perturbations");
    add_common(c_probe, probe_o);
    c_probe->add_option("--eps", probe_eps, "perturbation size");
    c_probe->add_option("--trials", probe_trials, "number of perturbations");
    c_probe->add_option("--seed", probe_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_solve->parsed()) return cmd_solve(solve_o);
        if (c_trunc->parsed()) return cmd_truncate(trunc_o, trunc_depth);
        if (c_sample->parsed())
            return cmd_sample(sample_o, sample_depth, sample_seed, sample_root, sample_cap);
        if (c_mc->parsed())
            return cmd_montecarlo(mc_o, mc_game, mc_mover, mc_root, mc_depth, mc_samples, mc_seed,
                                  mc_cap);
        if (c_bin->parsed()) return cmd_binary(bin, bin_dump);
        if (c_po->parsed()) return cmd_poisson(po_lambda, po_pb, po_qb, po_grid, po_dump);
        if (c_check->parsed()) return cmd_check(check_o);
        if (c_survive->parsed()) return cmd_survive(survive_o, survive_cap);
        if (c_probe->parsed()) return cmd_probe(probe_o, probe_eps, probe_trials, probe_seed);
    } catch (const consistency_error& e) {
        std::cerr << "internal-consistency error: " << e.what() << "\n";
        return 3;
    } catch (const spec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
