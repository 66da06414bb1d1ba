#pragma once

// Tree sampling and Monte Carlo estimation. Randomness is counter-based:
// every vertex of every sampled tree gets its own stream derived from
// (seed, index), so results are reproducible and independent of scheduling.

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "fixedpoint.hpp"
#include "model.hpp"

namespace gwgames {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

struct RngStream {
    std::uint64_t state;

    RngStream(std::uint64_t seed, std::uint64_t stream) {
        state = detail::mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
    }

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state);
    }

    double next_unit() {  // uniform in [0,1)
        return (next_u64() >> 11) * 0x1.0p-53;
    }
};

namespace detail {

inline int poisson_knuth(RngStream& rng, double mean) {
    double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_unit();
    } while (p > limit);
    return k - 1;
}

}  // namespace detail

// exact Poisson draw; large means are split into chunks (Poisson additivity)
inline int poisson_draw(RngStream& rng, double mean) {
    if (!(mean >= 0.0)) throw spec_error("poisson mean must be non-negative");
    int total = 0;
    while (mean > 30.0) {
        total += detail::poisson_knuth(rng, 30.0);
        mean -= 30.0;
    }
    if (mean > 0.0) total += detail::poisson_knuth(rng, mean);
    return total;
}

inline int categorical_draw(RngStream& rng, const std::vector<double>& probs) {
    double u = rng.next_unit();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return (int)i;
    }
    return (int)probs.size() - 1;
}

struct TreeVertex {
    int color;
    int parent;       // -1 for the root
    int depth;
    int first_child;  // children occupy [first_child, first_child + num_children)
    int num_children;
};

struct SampledTree {
    std::vector<TreeVertex> vertices;  // breadth-first order, children contiguous
    int truncation_depth = 0;
};

// expected total population up to `depth` generations, by powers of the mean matrix
inline double expected_population(const ModelSpec& spec, int depth, int root_color = -1) {
    auto mat = mean_matrix(spec);
    std::vector<double> gen(spec.m, 0.0);
    if (root_color >= 0)
        gen[root_color] = 1.0;
    else
        gen = spec.root_law;
    double total = 0.0;
    for (int d = 0; d <= depth; ++d) {
        for (double g : gen) total += g;
        if (total > 1e18 || d == depth) break;
        std::vector<double> next(spec.m, 0.0);
        for (int i = 0; i < spec.m; ++i)
            for (int j = 0; j < spec.m; ++j) next[j] += gen[i] * mat[i][j];
        gen = std::move(next);
    }
    return total;
}

// Sample one tree down to `depth` generations. root_color = -1 draws the root
// from the spec's root law. Aborts before sampling if the expected population
// exceeds population_cap.
inline SampledTree sample_tree(const ModelSpec& spec, int depth, std::uint64_t seed,
                               int root_color = -1, double population_cap = 1e7) {
    if (depth < 0) throw spec_error("tree depth must be non-negative");
    if (root_color >= spec.m) throw spec_error("root color out of range");
    double expected = expected_population(spec, depth, root_color);
    if (expected > population_cap)
        throw spec_error("expected population " + std::to_string(expected) +
                         " exceeds cap " + std::to_string(population_cap));
    SampledTree tree;
    tree.truncation_depth = depth;
    int root = root_color;
    if (root < 0) {
        RngStream rng(seed, ~std::uint64_t(0));
        root = categorical_draw(rng, spec.root_law);
    }
    tree.vertices.push_back({root, -1, 0, 0, 0});
    std::vector<int> counts(spec.m);
    for (std::uint64_t v = 0; v < tree.vertices.size(); ++v) {
        TreeVertex& me = tree.vertices[v];
        if (me.depth >= depth) continue;
        RngStream rng(seed, v);
        const OffspringLaw& law = spec.offspring[me.color];
        if (law.kind == OffspringLaw::Kind::Table) {
            int idx = 0;
            double u = rng.next_unit(), acc = 0.0;
            for (size_t i = 0; i < law.entries.size(); ++i) {
                acc += law.entries[i].prob;
                idx = (int)i;
                if (u < acc) break;
            }
            counts = law.entries[idx].counts;
        } else {
            for (int k = 0; k < spec.m; ++k) counts[k] = poisson_draw(rng, law.means[k]);
        }
        int first = (int)tree.vertices.size();
        int total = 0;
        for (int k = 0; k < spec.m; ++k) total += counts[k];
        me.first_child = first;
        me.num_children = total;
        int depth_child = me.depth + 1;
        int parent = (int)v;
        for (int k = 0; k < spec.m; ++k)
            for (int c = 0; c < counts[k]; ++c)
                tree.vertices.push_back({k, parent, depth_child, 0, 0});
    }
    return tree;
}

enum class GameLabel : char { Win = 'W', Lose = 'L', Draw = 'D' };

// labels[side][v]: game value at vertex v when the player of that side
// (0 = player one, 1 = player two) is about to move there
struct TreeLabels {
    std::vector<GameLabel> side[2];
};

inline TreeLabels solve_tree_labels(const SampledTree& tree, GameKind kind,
                                    const PermissibleSets& permissible) {
    int n = (int)tree.vertices.size();
    int m = (int)permissible.sets.size();
    TreeLabels lab;
    lab.side[0].resize(n);
    lab.side[1].resize(n);
    ColorSet all = full_set(m);
    for (int v = n - 1; v >= 0; --v) {
        const TreeVertex& me = tree.vertices[v];
        for (int side = 0; side < 2; ++side) {
            if (me.depth >= tree.truncation_depth) {
                // cut off by the horizon: value unknown
                lab.side[side][v] = GameLabel::Draw;
                continue;
            }
            ColorSet targets = side == 0 ? permissible.sets[me.color]
                                         : all & ~permissible.sets[me.color];
            const std::vector<GameLabel>& reply = lab.side[1 - side];
            bool any = false, win = false, draw = false;
            for (int c = 0; c < me.num_children; ++c) {
                int child = me.first_child + c;
                if (!set_contains(targets, tree.vertices[child].color)) continue;
                any = true;
                GameLabel after = reply[child];
                if (after == GameLabel::Lose) win = true;
                else if (after == GameLabel::Draw) draw = true;
            }
            GameLabel out;
            if (!any) {
                // stuck: lose in the normal game, win in the misere game; in the
                // escape game the stopper (player one) wins on any stuck player
                switch (kind) {
                    case GameKind::Normal: out = GameLabel::Lose; break;
                    case GameKind::Misere: out = GameLabel::Win; break;
                    default: out = side == 0 ? GameLabel::Win : GameLabel::Lose; break;
                }
            } else if (win) {
                out = GameLabel::Win;
            } else if (draw) {
                out = GameLabel::Draw;
            } else {
                out = GameLabel::Lose;
            }
            lab.side[side][v] = out;
        }
    }
    return lab;
}

// value at the root for the given first mover, on one sampled tree
inline GameLabel solve_game_on_tree(const SampledTree& tree, GameKind kind, FirstMover mover,
                                    const PermissibleSets& permissible) {
    TreeLabels lab = solve_tree_labels(tree, kind, permissible);
    return lab.side[mover == FirstMover::PlayerOne ? 0 : 1][0];
}

struct MonteCarloResult {
    long samples = 0;
    double win_hat = 0.0, lose_hat = 0.0, draw_hat = 0.0;
    double win_stderr = 0.0, lose_stderr = 0.0;
};

inline int worker_count() {
    if (const char* env = std::getenv("GWGAMES_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? (int)hw : 1;
}

// Monte Carlo estimate of the depth-truncated root value. Each sample uses its
// own tree seed derived from (seed, sample index), so the result does not
// depend on the worker count.
inline MonteCarloResult monte_carlo(const ModelSpec& spec, GameKind kind, FirstMover mover,
                                    int root_color, int depth, long samples, std::uint64_t seed,
                                    double population_cap = 1e7) {
    if (samples <= 0) throw spec_error("sample count must be positive");
    double expected = expected_population(spec, depth, root_color);
    if (expected > population_cap)
        throw spec_error("expected population " + std::to_string(expected) +
                         " exceeds cap " + std::to_string(population_cap));
    int workers = std::min<long>(worker_count(), samples);
    std::vector<long> wins(workers, 0), loses(workers, 0), draws(workers, 0);
    auto run = [&](int w) {
        long lo = samples * w / workers, hi = samples * (w + 1) / workers;
        for (long i = lo; i < hi; ++i) {
            std::uint64_t tree_seed = RngStream(seed, 0x747265657Aull + (std::uint64_t)i).next_u64();
            SampledTree tree = sample_tree(spec, depth, tree_seed, root_color, population_cap);
            switch (solve_game_on_tree(tree, kind, mover, spec.permissible)) {
                case GameLabel::Win: ++wins[w]; break;
                case GameLabel::Lose: ++loses[w]; break;
                default: ++draws[w]; break;
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    long cw = 0, cl = 0, cd = 0;
    for (int w = 0; w < workers; ++w) {
        cw += wins[w];
        cl += loses[w];
        cd += draws[w];
    }
    MonteCarloResult res;
    res.samples = samples;
    double n = (double)samples;
    res.win_hat = cw / n;
    res.lose_hat = cl / n;
    res.draw_hat = cd / n;
    res.win_stderr = std::sqrt(res.win_hat * (1.0 - res.win_hat) / n);
    res.lose_stderr = std::sqrt(res.lose_hat * (1.0 - res.lose_hat) / n);
    return res;
}

}  // namespace gwgames
