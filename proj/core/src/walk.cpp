#include "ortholap/walk.hpp"

#include <algorithm>
#include <cmath>

#include "ortholap/errors.hpp"
#include "ortholap/format.hpp"

namespace ortholap {

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, long trial_index) {
    return mix64(seed ^ mix64(0x9e3779b97f4a7c15ULL *
                              (static_cast<std::uint64_t>(trial_index) + 1ULL)));
}

// ---------------------------------------------------------------------------
// WalkEngine
// ---------------------------------------------------------------------------

WalkEngine::WalkEngine(const WeightedNetwork& net) : net_(&net) {
    const int m = net.size();
    offset_.assign(static_cast<size_t>(m) + 1, 0);
    for (int x = 0; x < m; ++x)
        offset_[static_cast<size_t>(x) + 1] =
            offset_[static_cast<size_t>(x)] +
            static_cast<int>(net.adj[static_cast<size_t>(x)].size());
    nbr_.resize(static_cast<size_t>(offset_.back()));
    cum_.resize(static_cast<size_t>(offset_.back()));
    for (int x = 0; x < m; ++x) {
        double acc = 0.0;
        int t = offset_[static_cast<size_t>(x)];
        for (const auto& [y, c] : net.adj[static_cast<size_t>(x)]) {
            acc += c;
            nbr_[static_cast<size_t>(t)] = y;
            cum_[static_cast<size_t>(t)] = acc;
            ++t;
        }
    }
}

int WalkEngine::step(int x, SplitMix64& rng) const {
    const int lo = offset_[static_cast<size_t>(x)];
    const int hi = offset_[static_cast<size_t>(x) + 1];
    const double total = cum_[static_cast<size_t>(hi) - 1];
    const double u = rng.uniform() * total;
    for (int t = lo; t < hi - 1; ++t)
        if (u < cum_[static_cast<size_t>(t)]) return nbr_[static_cast<size_t>(t)];
    return nbr_[static_cast<size_t>(hi) - 1];
}

WalkEngine::Outcome WalkEngine::run(int start, SplitMix64& rng, long max_steps) const {
    Outcome out;
    int x = start;
    long steps = 0;
    while (!net_->absorbing[static_cast<size_t>(x)]) {
        if (steps >= max_steps) {
            out.final_index = x;
            out.steps = steps;
            out.capped = true;
            return out;
        }
        x = step(x, rng);
        ++steps;
    }
    out.final_index = x;
    out.steps = steps;
    return out;
}

std::vector<std::pair<int, double>> WalkEngine::step_distribution(int x) const {
    std::vector<std::pair<int, double>> out;
    const int lo = offset_[static_cast<size_t>(x)];
    const int hi = offset_[static_cast<size_t>(x) + 1];
    const double total = cum_[static_cast<size_t>(hi) - 1];
    double prev = 0.0;
    for (int t = lo; t < hi; ++t) {
        out.push_back({nbr_[static_cast<size_t>(t)],
                       (cum_[static_cast<size_t>(t)] - prev) / total});
        prev = cum_[static_cast<size_t>(t)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

namespace {

void check_config(const WalkConfig& cfg) {
    require(cfg.trials > 0, "DomainError", "walk estimators need at least one trial");
    require(cfg.max_steps > 0, "DomainError", "step cap must be positive");
}

void check_start(const WalkEngine& engine, int start) {
    require(start >= 0 && start < engine.network().size(), "DomainError",
            "walk start index out of range");
}

EstimateWithError summarize(std::vector<double> values, long caps, long trials,
                            double max_cap_fraction) {
    EstimateWithError est;
    est.caps = caps;
    est.n = static_cast<long>(values.size());
    est.mean = est.n > 0 ? pairwise_sum(values) / static_cast<double>(est.n) : 0.0;
    require(static_cast<double>(caps) <= max_cap_fraction * static_cast<double>(trials),
            "ExcessiveCaps", std::to_string(caps) + " of " + std::to_string(trials) +
                                 " walks hit the step cap");
    if (est.n > 1) {
        std::vector<double> sq;
        sq.reserve(values.size());
        for (double v : values) sq.push_back((v - est.mean) * (v - est.mean));
        const double var = pairwise_sum(sq) / static_cast<double>(est.n - 1);
        est.std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(est.n));
    }
    return est;
}

}  // namespace

EstimateWithError walk_estimate(const WalkEngine& engine, int start,
                                const std::function<double(int)>& payoff,
                                const WalkConfig& cfg) {
    check_config(cfg);
    check_start(engine, start);
    std::vector<double> values;
    values.reserve(static_cast<size_t>(cfg.trials));
    long caps = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(trial_seed(cfg.seed, t));
        const WalkEngine::Outcome o = engine.run(start, rng, cfg.max_steps);
        if (o.capped) {
            ++caps;
            continue;
        }
        values.push_back(payoff(o.final_index));
    }
    return summarize(std::move(values), caps, cfg.trials, cfg.max_cap_fraction);
}

EstimateWithError harmonic_measure(const WalkEngine& engine, int start,
                                   const std::vector<char>& target, const WalkConfig& cfg) {
    require(target.size() == static_cast<size_t>(engine.network().size()), "SideMismatch",
            "target mask must cover the network");
    return walk_estimate(
        engine, start,
        [&target](int v) { return target[static_cast<size_t>(v)] ? 1.0 : 0.0; }, cfg);
}

BeurlingResult beurling_probe(const WalkEngine& engine, int start, Vec2 anchor,
                              const std::vector<double>& radii, const WalkConfig& cfg) {
    check_config(cfg);
    check_start(engine, start);
    require(!radii.empty(), "DomainError", "escape probe needs at least one radius");
    for (size_t k = 1; k < radii.size(); ++k)
        require(radii[k] > radii[k - 1], "SpacingNonMonotone",
                "radii must be strictly increasing");

    const WeightedNetwork& net = engine.network();
    BeurlingResult res;
    res.all_radii = radii;
    res.trials = cfg.trials;
    res.exceedances.assign(radii.size(), 0);

    // One walk per trial; its maximum distance from the anchor serves every
    // radius, which makes the tail exactly nested across radii.
    std::vector<double> max_dist;
    max_dist.reserve(static_cast<size_t>(cfg.trials));
    long caps = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(trial_seed(cfg.seed, t));
        int x = start;
        double best = dist(net.positions[static_cast<size_t>(x)], anchor);
        long steps = 0;
        bool capped = false;
        while (!net.absorbing[static_cast<size_t>(x)]) {
            if (steps >= cfg.max_steps) {
                capped = true;
                break;
            }
            x = engine.step(x, rng);
            ++steps;
            best = std::max(best, dist(net.positions[static_cast<size_t>(x)], anchor));
        }
        if (capped) {
            ++caps;
            continue;
        }
        max_dist.push_back(best);
    }
    require(static_cast<double>(caps) <=
                cfg.max_cap_fraction * static_cast<double>(cfg.trials),
            "ExcessiveCaps", std::to_string(caps) + " of " + std::to_string(cfg.trials) +
                                 " walks hit the step cap");

    const long n = static_cast<long>(max_dist.size());
    for (size_t k = 0; k < radii.size(); ++k)
        for (double m : max_dist)
            if (m >= radii[k]) ++res.exceedances[k];

    for (size_t k = 0; k < radii.size(); ++k) {
        const long c = res.exceedances[k];
        // p = 1 carries no slope information; tiny counts are unstable.
        if (c < cfg.min_exceedances || c == n) continue;
        EstimateWithError est;
        est.n = n;
        est.caps = caps;
        est.mean = static_cast<double>(c) / static_cast<double>(n);
        est.std_err = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(n));
        res.fit_radii.push_back(radii[k]);
        res.estimates.push_back(est);
    }
    require(res.fit_radii.size() >= 3, "InsufficientExceedances",
            "only " + std::to_string(res.fit_radii.size()) +
                " radii have usable exceedance counts (need 3)");

    // Least squares for log p = intercept - beta log r.
    const size_t m = res.fit_radii.size();
    std::vector<double> lx(m), ly(m);
    for (size_t k = 0; k < m; ++k) {
        lx[k] = std::log(res.fit_radii[k]);
        ly[k] = std::log(res.estimates[k].mean);
    }
    double sx = 0.0, sy = 0.0;
    for (size_t k = 0; k < m; ++k) {
        sx += lx[k];
        sy += ly[k];
    }
    const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < m; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    require(sxx > 0.0, "DegenerateFit", "escape radii collapse to a single value");
    const double slope = sxy / sxx;
    res.beta_hat = -slope;
    double sse = 0.0;
    for (size_t k = 0; k < m; ++k) {
        const double e = ly[k] - (my + slope * (lx[k] - mx));
        sse += e * e;
    }
    res.beta_se = m > 2 ? std::sqrt(sse / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
    return res;
}

QuadrantExitResult property_s_probe(const OrthodiagonalMap& map, const WalkEngine& engine,
                                    int center_id, double radius, const WalkConfig& cfg) {
    check_config(cfg);
    const WeightedNetwork& net = engine.network();
    require(center_id >= 0 && center_id < map.vertex_count() &&
                net.net_index[static_cast<size_t>(center_id)] >= 0,
            "DomainError", "center vertex is not part of the walk network");
    const int start = net.net_index[static_cast<size_t>(center_id)];
    const Vec2 center = map.pos(center_id);
    require(radius >= 4.0 * map.mesh_eps, "MeshTooCoarse",
            "ball radius must be at least four mesh units");
    require(map.boundary_distance(center) > radius + map.mesh_eps, "BallNotContained",
            "ball of radius " + fmt_g12(radius) + " is not strictly inside the meshed region");

    QuadrantExitResult res;
    res.trials = cfg.trials;
    long caps = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(trial_seed(cfg.seed, t));
        int x = start;
        long steps = 0;
        bool capped = false;
        while (dist(net.positions[static_cast<size_t>(x)], center) < radius) {
            if (steps >= cfg.max_steps) {
                capped = true;
                break;
            }
            require(!net.absorbing[static_cast<size_t>(x)], "BallNotContained",
                    "walk met an absorbing vertex inside the ball");
            x = engine.step(x, rng);
            ++steps;
        }
        if (capped) {
            ++caps;
            continue;
        }
        const Vec2 d = net.positions[static_cast<size_t>(x)] - center;
        // Half-open quadrants: [0,90), [90,180), [180,270), [270,360) degrees.
        int q;
        if (d.x > 0.0 && d.y >= 0.0)
            q = 0;
        else if (d.x <= 0.0 && d.y > 0.0)
            q = 1;
        else if (d.x < 0.0 && d.y <= 0.0)
            q = 2;
        else
            q = 3;
        ++res.counts[static_cast<size_t>(q)];
    }
    require(static_cast<double>(caps) <=
                cfg.max_cap_fraction * static_cast<double>(cfg.trials),
            "ExcessiveCaps", std::to_string(caps) + " walks hit the step cap");
    const long n = cfg.trials - caps;
    for (size_t q = 0; q < 4; ++q)
        res.probs[q] = n > 0 ? static_cast<double>(res.counts[q]) / static_cast<double>(n) : 0.0;
    res.std_err = n > 0 ? std::sqrt(0.25 * 0.75 / static_cast<double>(n)) : 0.0;
    return res;
}

EstimateWithError annulus_crossing_probe(const WalkEngine& engine, int start, Vec2 center,
                                         double r_out, const WalkConfig& cfg) {
    check_config(cfg);
    check_start(engine, start);
    require(r_out > 0.0, "DomainError", "outer radius must be positive");
    const WeightedNetwork& net = engine.network();
    std::vector<double> values;
    values.reserve(static_cast<size_t>(cfg.trials));
    long caps = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        SplitMix64 rng(trial_seed(cfg.seed, t));
        int x = start;
        long steps = 0;
        int outcome = -1;
        while (outcome < 0) {
            if (net.absorbing[static_cast<size_t>(x)]) {
                outcome = 0;  // barrier first, even past r_out
            } else if (dist(net.positions[static_cast<size_t>(x)], center) >= r_out) {
                outcome = 1;
            } else if (steps >= cfg.max_steps) {
                break;
            } else {
                x = engine.step(x, rng);
                ++steps;
            }
        }
        if (outcome < 0) {
            ++caps;
            continue;
        }
        values.push_back(static_cast<double>(outcome));
    }
    return summarize(std::move(values), caps, cfg.trials, cfg.max_cap_fraction);
}

}  // namespace ortholap
