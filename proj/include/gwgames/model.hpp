#pragma once

// Core model for colored Galton-Watson game trees: colors, permissible move
// sets, offspring laws (finite tables or independent Poisson marginals), and
// the probability-generating-function engine everything else is built on.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwgames {

// invalid user input: bad spec files, malformed laws, out-of-range parameters
struct spec_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// two routes to the same quantity disagreed beyond tolerance
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kProbTol = 1e-12;
inline constexpr int kMaxColors = 30;

// subset of colors as a bitmask; colors are 0-indexed internally,
// 1-indexed in files and CLI output
using ColorSet = std::uint32_t;

inline bool set_contains(ColorSet s, int k) { return (s >> k) & 1u; }
inline int set_size(ColorSet s) { return std::popcount(s); }
inline ColorSet full_set(int m) { return (ColorSet(1) << m) - 1u; }

inline std::vector<int> set_to_list(ColorSet s, int m) {
    std::vector<int> out;
    for (int k = 0; k < m; ++k)
        if (set_contains(s, k)) out.push_back(k);
    return out;
}

struct PermissibleSets {
    std::vector<ColorSet> sets;  // sets[j] = move targets for the first player at color j

    void validate(int m) const {
        if ((int)sets.size() != m)
            throw spec_error("permissible: expected one set per color");
        for (int j = 0; j < m; ++j) {
            int sz = set_size(sets[j]);
            if (sz == 0)
                throw spec_error("permissible set for color " + std::to_string(j + 1) + " is empty");
            if (sz == m)
                throw spec_error("permissible set for color " + std::to_string(j + 1) +
                                 " must be a proper subset of the colors");
            if (sets[j] & ~full_set(m))
                throw spec_error("permissible set for color " + std::to_string(j + 1) +
                                 " mentions an unknown color");
        }
    }
};

struct TableEntry {
    std::vector<int> counts;  // offspring counts per color
    double prob = 0.0;
};

struct OffspringLaw {
    enum class Kind { Table, Poisson };

    Kind kind = Kind::Table;
    int colors = 0;
    std::vector<TableEntry> entries;  // Table: canonical (sorted, merged, no zero rows)
    std::vector<double> means;        // Poisson: per-color means

    static OffspringLaw table(int m, std::vector<TableEntry> rows) {
        if (m < 2 || m > kMaxColors) throw spec_error("color count out of range");
        std::map<std::vector<int>, double> merged;
        double total = 0.0;
        for (auto& e : rows) {
            if ((int)e.counts.size() != m)
                throw spec_error("table row has wrong tuple length");
            for (int c : e.counts)
                if (c < 0) throw spec_error("negative offspring count");
            if (!(e.prob >= 0.0) || !std::isfinite(e.prob))
                throw spec_error("table probability must be finite and non-negative");
            merged[e.counts] += e.prob;
            total += e.prob;
        }
        if (std::fabs(total - 1.0) > kProbTol)
            throw spec_error("table probabilities sum to " + std::to_string(total) + ", not 1");
        OffspringLaw law;
        law.kind = Kind::Table;
        law.colors = m;
        for (auto& [counts, p] : merged)
            if (p > 0.0) law.entries.push_back({counts, p / total});
        if (law.entries.empty())
            throw spec_error("table law has no positive-probability row");
        // pin the last row so canonical tables sum to exactly 1.0; this makes
        // canonicalization idempotent and spec files round-trip bit for bit
        while (!law.entries.empty()) {
            double rest = 0.0;
            for (size_t i = 0; i + 1 < law.entries.size(); ++i) rest += law.entries[i].prob;
            double last = 1.0 - rest;
            if (last > 0.0) {
                law.entries.back().prob = last;
                break;
            }
            law.entries.pop_back();
        }
        if (law.entries.empty())
            throw spec_error("table law has no positive-probability row");
        return law;
    }

    static OffspringLaw poisson(std::vector<double> means) {
        int m = (int)means.size();
        if (m < 2 || m > kMaxColors) throw spec_error("color count out of range");
        for (double mu : means)
            if (!(mu >= 0.0) || !std::isfinite(mu))
                throw spec_error("poisson mean must be finite and non-negative");
        OffspringLaw law;
        law.kind = Kind::Poisson;
        law.colors = m;
        law.means = std::move(means);
        return law;
    }

    bool operator==(const OffspringLaw& o) const {
        if (kind != o.kind || colors != o.colors) return false;
        if (kind == Kind::Poisson) return means == o.means;
        if (entries.size() != o.entries.size()) return false;
        for (size_t i = 0; i < entries.size(); ++i)
            if (entries[i].counts != o.entries[i].counts || entries[i].prob != o.entries[i].prob)
                return false;
        return true;
    }
};

// a point of [0,1]^m indexed by color
struct ProbVector {
    std::vector<double> values;

    ProbVector() = default;
    explicit ProbVector(std::vector<double> v) : values(std::move(v)) {
        for (double& x : values) {
            if (!(x > -kProbTol) || !(x < 1.0 + kProbTol))
                throw spec_error("probability entry outside [0,1]: " + std::to_string(x));
            x = std::clamp(x, 0.0, 1.0);
        }
    }

    double operator[](size_t i) const { return values[i]; }
    size_t size() const { return values.size(); }
};

struct ModelSpec {
    int m = 0;
    std::vector<double> root_law;
    std::vector<OffspringLaw> offspring;
    PermissibleSets permissible;

    static ModelSpec create(int m, std::vector<double> root_law,
                            std::vector<OffspringLaw> offspring,
                            PermissibleSets permissible) {
        if (m < 2) throw spec_error("need at least two colors");
        if (m > kMaxColors) throw spec_error("too many colors");
        if ((int)root_law.size() != m) throw spec_error("root law has wrong length");
        double total = 0.0;
        for (double p : root_law) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw spec_error("root law entries must be finite and non-negative");
            total += p;
        }
        if (std::fabs(total - 1.0) > kProbTol)
            throw spec_error("root law sums to " + std::to_string(total) + ", not 1");
        for (double& p : root_law) p /= total;
        // same exact-sum pinning as table laws, so specs round-trip bit for bit
        double rest = 0.0;
        for (int i = 0; i + 1 < m; ++i) rest += root_law[i];
        if (1.0 - rest > 0.0) root_law[m - 1] = 1.0 - rest;
        if ((int)offspring.size() != m) throw spec_error("expected one offspring law per color");
        for (auto& law : offspring)
            if (law.colors != m) throw spec_error("offspring law color count mismatch");
        permissible.validate(m);
        ModelSpec spec;
        spec.m = m;
        spec.root_law = std::move(root_law);
        spec.offspring = std::move(offspring);
        spec.permissible = std::move(permissible);
        return spec;
    }

    ColorSet moves(int j) const { return permissible.sets[j]; }           // first-player targets
    ColorSet counter_moves(int j) const {                                 // second-player targets
        return full_set(m) & ~permissible.sets[j];
    }

    bool operator==(const ModelSpec& o) const {
        return m == o.m && root_law == o.root_law && offspring == o.offspring &&
               permissible.sets == o.permissible.sets;
    }
};

namespace detail {

inline double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

inline void check_point(ColorSet s, const std::vector<double>& x, int m) {
    if (s == 0) throw spec_error("pgf restriction set is empty");
    if ((int)x.size() < m) throw spec_error("pgf point has too few coordinates");
    for (int k = 0; k < m; ++k) {
        if (!set_contains(s, k)) continue;
        if (!(x[k] > -1e-9) || !(x[k] < 1.0 + 1e-9))
            throw spec_error("pgf point entry outside [0,1]");
    }
}

}  // namespace detail

// G_{S}(x) = E prod_{k in S} x_k^{X_k}; coordinates of x outside S are ignored
inline double pgf_eval(const OffspringLaw& law, ColorSet s, const std::vector<double>& x) {
    int m = law.colors;
    detail::check_point(s, x, m);
    if (law.kind == OffspringLaw::Kind::Poisson) {
        double ex = 0.0;
        for (int k = 0; k < m; ++k)
            if (set_contains(s, k)) ex += law.means[k] * (std::clamp(x[k], 0.0, 1.0) - 1.0);
        return std::exp(ex);
    }
    double total = 0.0;
    for (const auto& e : law.entries) {
        double term = e.prob;
        for (int k = 0; k < m; ++k)
            if (set_contains(s, k)) term *= detail::ipow(std::clamp(x[k], 0.0, 1.0), e.counts[k]);
        total += term;
    }
    return total;
}

// partial derivative of the restricted pgf in direction k
inline double pgf_partial(const OffspringLaw& law, ColorSet s, int k, const std::vector<double>& x) {
    int m = law.colors;
    detail::check_point(s, x, m);
    if (k < 0 || k >= m || !set_contains(s, k))
        throw spec_error("derivative direction is not in the restriction set");
    if (law.kind == OffspringLaw::Kind::Poisson)
        return law.means[k] * pgf_eval(law, s, x);
    double total = 0.0;
    for (const auto& e : law.entries) {
        if (e.counts[k] == 0) continue;
        double term = e.prob * e.counts[k] * detail::ipow(std::clamp(x[k], 0.0, 1.0), e.counts[k] - 1);
        for (int l = 0; l < m; ++l)
            if (l != k && set_contains(s, l))
                term *= detail::ipow(std::clamp(x[l], 0.0, 1.0), e.counts[l]);
        total += term;
    }
    return total;
}

// alpha[j]: no child with color in the first player's move set, given parent color j;
// beta[j]: same for the second player's move set
inline std::pair<ProbVector, ProbVector> alpha_beta(const ModelSpec& spec) {
    std::vector<double> a(spec.m), b(spec.m);
    std::vector<double> zeros(spec.m, 0.0);
    for (int j = 0; j < spec.m; ++j) {
        a[j] = pgf_eval(spec.offspring[j], spec.moves(j), zeros);
        b[j] = pgf_eval(spec.offspring[j], spec.counter_moves(j), zeros);
    }
    return {ProbVector(std::move(a)), ProbVector(std::move(b))};
}

inline std::vector<double> mean_vector(const OffspringLaw& law) {
    if (law.kind == OffspringLaw::Kind::Poisson) return law.means;
    std::vector<double> mu(law.colors, 0.0);
    for (const auto& e : law.entries)
        for (int k = 0; k < law.colors; ++k) mu[k] += e.prob * e.counts[k];
    return mu;
}

inline std::vector<std::vector<double>> mean_matrix(const ModelSpec& spec) {
    std::vector<std::vector<double>> mat(spec.m);
    for (int i = 0; i < spec.m; ++i) mat[i] = mean_vector(spec.offspring[i]);
    return mat;
}

// expected number of children with color in S
inline double restricted_mean(const OffspringLaw& law, ColorSet s) {
    auto mu = mean_vector(law);
    double total = 0.0;
    for (int k = 0; k < law.colors; ++k)
        if (set_contains(s, k)) total += mu[k];
    return total;
}

namespace detail {

// smallest n with certified P[Poisson(mean) > n] < tail
inline int poisson_cutoff(double mean, double tail) {
    if (mean <= 0.0) return 0;
    int n = (int)std::ceil(mean) + 1;
    for (;; ++n) {
        // for n >= mean the pmf decays at least geometrically with ratio mean/(n+2)
        double ratio = mean / (n + 2);
        if (ratio >= 1.0) continue;
        double lp = -mean + (n + 1) * std::log(mean) - std::lgamma(n + 2.0);
        double bound = std::exp(lp) / (1.0 - ratio);
        if (bound < tail) return n;
    }
}

inline double poisson_logpmf(int k, double mean) {
    if (mean <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -mean + k * std::log(mean) - std::lgamma(k + 1.0);
}

// law as a finite map tuple -> probability; Poisson laws are truncated per
// coordinate with certified total tail below `tail`, returned in *tail_out
inline std::map<std::vector<int>, double> law_as_table(const OffspringLaw& law, double tail,
                                                       double* tail_out) {
    std::map<std::vector<int>, double> out;
    if (law.kind == OffspringLaw::Kind::Table) {
        for (const auto& e : law.entries) out[e.counts] += e.prob;
        *tail_out = 0.0;
        return out;
    }
    int m = law.colors;
    double per_coord = tail / m;
    std::vector<int> cut(m);
    double box = 1.0;
    for (int k = 0; k < m; ++k) {
        cut[k] = poisson_cutoff(law.means[k], per_coord);
        box *= cut[k] + 1;
        if (box > 4e6)
            throw spec_error("poisson law too large for certified total-variation truncation");
    }
    std::vector<int> tuple(m, 0);
    double covered = 0.0;
    for (;;) {
        double lp = 0.0;
        for (int k = 0; k < m; ++k) lp += poisson_logpmf(tuple[k], law.means[k]);
        double p = std::exp(lp);
        out[tuple] = p;
        covered += p;
        int k = 0;
        while (k < m && tuple[k] == cut[k]) tuple[k++] = 0;
        if (k == m) break;
        ++tuple[k];
    }
    *tail_out = std::max(0.0, 1.0 - covered);
    return out;
}

}  // namespace detail

// total variation distance between two offspring laws on the same color set;
// exact for table pairs, a certified upper bound (slack < 1e-10) otherwise
inline double law_tv_distance(const OffspringLaw& a, const OffspringLaw& b) {
    if (a.colors != b.colors) throw spec_error("laws have different color counts");
    double tail_a = 0.0, tail_b = 0.0;
    auto ta = detail::law_as_table(a, 5e-11, &tail_a);
    auto tb = detail::law_as_table(b, 5e-11, &tail_b);
    double l1 = 0.0;
    for (const auto& [tuple, p] : ta) {
        auto it = tb.find(tuple);
        l1 += std::fabs(p - (it == tb.end() ? 0.0 : it->second));
    }
    for (const auto& [tuple, p] : tb)
        if (!ta.count(tuple)) l1 += p;
    return 0.5 * l1 + 0.5 * (tail_a + tail_b);
}

// max over colors of the offspring-law total variation distance
inline double d0_distance(const ModelSpec& a, const ModelSpec& b) {
    if (a.m != b.m) throw spec_error("specs have different color counts");
    if (a.permissible.sets != b.permissible.sets)
        throw spec_error("specs have different permissible sets");
    double worst = 0.0;
    for (int j = 0; j < a.m; ++j)
        worst = std::max(worst, law_tv_distance(a.offspring[j], b.offspring[j]));
    return worst;
}

}  // namespace gwgames
