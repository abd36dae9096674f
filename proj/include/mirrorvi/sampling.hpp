#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mirrorvi/types.hpp"

namespace mirrorvi {

/// Deterministic uniform/exponential draws on top of mt19937_64. The
/// transforms are written out explicitly so that a given seed reproduces the
/// same sample stream on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard exponential; strictly positive.
    double exponential() {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return -std::log(u);
    }

private:
    std::mt19937_64 gen_;
};

/// Where certifier samples come from: a coordinate box (uniform) or a product
/// of simplices (flat Dirichlet per block, strictly interior a.s.).
struct SampleDomain {
    enum class Kind { Box, SimplexProduct };

    Kind kind = Kind::Box;
    Vector lo, hi;              // Box
    std::vector<int> blocks;    // SimplexProduct

    static SampleDomain box(Vector lo, Vector hi);
    static SampleDomain unit_box(int dim);  // [-1, 1]^dim
    static SampleDomain simplex_product(std::vector<int> blocks);

    int dim() const;
    Vector sample(Rng& rng) const;
};

/// Seeded sampler handed to the certifiers; (seed, domain) fully determine
/// the sample stream.
struct Sampler {
    SampleDomain domain;
    std::uint64_t seed = 0;
};

} // namespace mirrorvi
