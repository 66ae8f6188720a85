#pragma once

#include <cstdint>
#include <vector>

#include "fikit/space.hpp"

namespace fikit {

/// 1D profile coordinate used by the generators: the first coordinate when
/// the space has coordinates, otherwise the distance from a base point
/// (1-Lipschitz in the metric, so 1D Lipschitz bounds transfer).
ScalarField profile_coordinate(const MetricSpace& space, int base = 0);

/// f_λ(x) = exp(λ·x̃/2) for each λ.
std::vector<ScalarField> exponential_family(const MetricSpace& space,
                                            const std::vector<double>& lambdas);

/// g(x) = amplitude·sin(omega·x̃ + phase).
ScalarField trig_field(const MetricSpace& space, double amplitude, double omega, double phase);

/// Seeded random band-limited field with Lipschitz constant ≤ lip and
/// |f| ≤ bound; a short sine series with controlled total amplitude.
ScalarField random_lipschitz_field(const MetricSpace& space, double lip, std::uint64_t seed);

std::vector<ScalarField> random_lipschitz_family(const MetricSpace& space, double lip,
                                                 int count, std::uint64_t seed);

/// ν ∝ μ·e^{field} for a seeded random Lipschitz field of the given size —
/// always strictly positive, hence ν ≪ μ wherever μ > 0.
ProbabilityMeasure random_perturbed_measure(const MetricSpace& space,
                                            const ProbabilityMeasure& mu, double lip,
                                            std::uint64_t seed);

std::vector<ProbabilityMeasure> random_perturbed_family(const MetricSpace& space,
                                                        const ProbabilityMeasure& mu, double lip,
                                                        int count, std::uint64_t seed);

}  // namespace fikit
