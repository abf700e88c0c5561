#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ortholap/map.hpp"
#include "ortholap/network.hpp"

namespace ortholap {

// Deterministic counter-based pseudo-random numbers (SplitMix64). Every
// estimator derives one generator per trial from (seed, trial index), so
// results are reproducible and independent of batching.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stateless finalizer used to derive independent per-trial seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t seed, long trial_index);

struct WalkConfig {
    std::uint64_t seed = 0;
    long trials = 10000;
    long max_steps = 10'000'000;   // per walk; hitting it marks the walk capped
    double max_cap_fraction = 0.01;  // beyond this, ExcessiveCaps
    int min_exceedances = 25;        // tail radii below this are dropped from fits
};

struct EstimateWithError {
    double mean = 0.0;
    double std_err = 0.0;
    long n = 0;     // contributing trials (caps excluded)
    long caps = 0;  // walks stopped by the step cap
};

// Random walk on a weighted network: from x, move to neighbor y with
// probability c(x,y)/pi_x; absorbing vertices stop the walk.
class WalkEngine {
public:
    explicit WalkEngine(const WeightedNetwork& net);

    const WeightedNetwork& network() const { return *net_; }

    // One transition (x must not be absorbing).
    int step(int x, SplitMix64& rng) const;

    struct Outcome {
        int final_index = -1;
        long steps = 0;
        bool capped = false;
    };
    Outcome run(int start, SplitMix64& rng, long max_steps) const;

    // Transition probabilities out of x (for exactness checks).
    std::vector<std::pair<int, double>> step_distribution(int x) const;

private:
    const WeightedNetwork* net_;
    std::vector<int> offset_;
    std::vector<int> nbr_;
    std::vector<double> cum_;  // cumulative conductance per neighbor run
};

// Monte Carlo estimate of E[payoff(absorption vertex)] for walks started at
// `start`. Capped walks are excluded from the mean; more than
// max_cap_fraction of them raises ExcessiveCaps.
EstimateWithError walk_estimate(const WalkEngine& engine, int start,
                                const std::function<double(int)>& payoff,
                                const WalkConfig& cfg);

// Probability of absorbing inside the marked target subset (by network index).
EstimateWithError harmonic_measure(const WalkEngine& engine, int start,
                                   const std::vector<char>& target, const WalkConfig& cfg);

// Escape-distance tail from a start next to an absorbing obstacle: one walk
// per trial records the maximum distance from `anchor` it ever attains, and
// every radius is evaluated on that same walk, so the tail estimates are
// exactly nested (monotone in r). The tail exponent is fit by least squares
// on log p vs log r over radii with enough exceedances.
struct BeurlingResult {
    std::vector<double> all_radii;
    std::vector<long> exceedances;              // per requested radius
    std::vector<double> fit_radii;              // radii used in the fit
    std::vector<EstimateWithError> estimates;   // parallel to fit_radii
    double beta_hat = 0.0;                      // decay exponent (positive)
    double beta_se = 0.0;                       // least-squares slope error
    long trials = 0;
};
BeurlingResult beurling_probe(const WalkEngine& engine, int start, Vec2 anchor,
                              const std::vector<double>& radii, const WalkConfig& cfg);

// Exit-quadrant balance for a ball around a vertex: walks run until they
// first leave the ball and the exit direction is binned into four half-open
// quadrants. On the symmetric lattice each bin has probability exactly 1/4.
struct QuadrantExitResult {
    std::array<long, 4> counts{0, 0, 0, 0};
    std::array<double, 4> probs{0.0, 0.0, 0.0, 0.0};
    double std_err = 0.0;  // binomial error of a single bin at p=1/4
    long trials = 0;
};
QuadrantExitResult property_s_probe(const OrthodiagonalMap& map, const WalkEngine& engine,
                                    int center_id, double radius, const WalkConfig& cfg);

// Probability of reaching distance r_out from `center` before hitting any
// absorbing vertex; the absorbing check runs first at every vertex, so a
// barrier on the way counts as a failure even at radius r_out.
EstimateWithError annulus_crossing_probe(const WalkEngine& engine, int start, Vec2 center,
                                         double r_out, const WalkConfig& cfg);

}  // namespace ortholap
