#include "fikit/families.hpp"

#include <cmath>
#include <random>

namespace fikit {

namespace {

// 53-bit uniform in [0, 1); std::uniform_real_distribution is
// implementation-defined, which would break byte-identical reports
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, int k) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(k) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

ScalarField profile_coordinate(const MetricSpace& space, int base) {
    ScalarField x(space.size(), 0.0);
    if (space.has_coords()) {
        for (int i = 0; i < space.size(); ++i) x[i] = space.coord(i, 0);
    } else {
        if (base < 0 || base >= space.size())
            throw std::invalid_argument("base point out of range");
        for (int i = 0; i < space.size(); ++i) x[i] = space.dist(base, i);
    }
    return x;
}

std::vector<ScalarField> exponential_family(const MetricSpace& space,
                                            const std::vector<double>& lambdas) {
    auto x = profile_coordinate(space);
    std::vector<ScalarField> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        ScalarField f(space.size(), 0.0);
        for (int i = 0; i < space.size(); ++i) f[i] = std::exp(lambda * x[i] / 2.0);
        out.push_back(std::move(f));
    }
    return out;
}

ScalarField trig_field(const MetricSpace& space, double amplitude, double omega, double phase) {
    auto x = profile_coordinate(space);
    ScalarField f(space.size(), 0.0);
    for (int i = 0; i < space.size(); ++i) f[i] = amplitude * std::sin(omega * x[i] + phase);
    return f;
}

ScalarField random_lipschitz_field(const MetricSpace& space, double lip, std::uint64_t seed) {
    if (!(lip > 0.0)) throw std::invalid_argument("needs lip > 0");
    std::mt19937_64 rng(seed);
    constexpr int modes = 4;
    double omega[modes], theta[modes], amp[modes];
    double weight = 0.0;
    for (int k = 0; k < modes; ++k) {
        omega[k] = 0.5 + 2.0 * next_uniform(rng);
        theta[k] = 2.0 * M_PI * next_uniform(rng);
        amp[k] = 0.3 + 0.7 * next_uniform(rng);
        weight += amp[k] * omega[k];
    }
    // scale so the 1D slope bound sum |a_k w_k| equals lip exactly; the
    // profile coordinate is 1-Lipschitz, so lip(f) <= lip on the space
    double scale = lip / weight;
    auto x = profile_coordinate(space);
    ScalarField f(space.size(), 0.0);
    for (int i = 0; i < space.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < modes; ++k)
            acc += scale * amp[k] * std::sin(omega[k] * x[i] + theta[k]);
        f[i] = acc;
    }
    return f;
}

std::vector<ScalarField> random_lipschitz_family(const MetricSpace& space, double lip, int count,
                                                 std::uint64_t seed) {
    std::vector<ScalarField> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        out.push_back(random_lipschitz_field(space, lip, mix_seed(seed, k)));
    return out;
}

ProbabilityMeasure random_perturbed_measure(const MetricSpace& space,
                                            const ProbabilityMeasure& mu, double lip,
                                            std::uint64_t seed) {
    auto f = random_lipschitz_field(space, lip, seed);
    std::vector<double> raw(static_cast<std::size_t>(mu.size()));
    for (int i = 0; i < mu.size(); ++i) raw[i] = mu[i] * std::exp(f[i]);
    return ProbabilityMeasure::normalized(std::move(raw));
}

std::vector<ProbabilityMeasure> random_perturbed_family(const MetricSpace& space,
                                                        const ProbabilityMeasure& mu, double lip,
                                                        int count, std::uint64_t seed) {
    std::vector<ProbabilityMeasure> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        out.push_back(random_perturbed_measure(space, mu, lip, mix_seed(seed, k)));
    return out;
}

}  // namespace fikit
