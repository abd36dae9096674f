#include "mirrorvi/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace mirrorvi {

SampleDomain SampleDomain::box(Vector lo, Vector hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw std::invalid_argument("box bounds must have equal positive size");
    SampleDomain d;
    d.kind = Kind::Box;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
}

SampleDomain SampleDomain::unit_box(int dim) {
    return box(Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0));
}

SampleDomain SampleDomain::simplex_product(std::vector<int> blocks) {
    if (blocks.empty())
        throw std::invalid_argument("at least one simplex block required");
    SampleDomain d;
    d.kind = Kind::SimplexProduct;
    d.blocks = std::move(blocks);
    return d;
}

int SampleDomain::dim() const {
    if (kind == Kind::Box) return static_cast<int>(lo.size());
    int n = 0;
    for (int b : blocks) n += b;
    return n;
}

Vector SampleDomain::sample(Rng& rng) const {
    Vector u(dim());
    if (kind == Kind::Box) {
        for (int i = 0; i < u.size(); ++i) u[i] = rng.uniform(lo[i], hi[i]);
        return u;
    }
    int off = 0;
    for (int b : blocks) {
        double sum = 0.0;
        for (int i = 0; i < b; ++i) {
            u[off + i] = rng.exponential();
            sum += u[off + i];
        }
        u.segment(off, b) /= sum;
        off += b;
    }
    return u;
}

} // namespace mirrorvi
