#pragma once

#include "operator.hpp"

namespace ncvar {

// Pairing of a covector tuple with a velocity tuple, as a functional.
inline Functional couple(const Context& ctx, const Tuple& p, const Tuple& phi) {
    if (static_cast<int>(p.size()) != ctx.gens || static_cast<int>(phi.size()) != ctx.gens)
        throw error("coupling requires one component per generator");
    CyclicPoly acc;
    for (int j = 0; j < ctx.gens; ++j)
        acc += close(ctx, poly_concat(ctx, p[static_cast<size_t>(j)], phi[static_cast<size_t>(j)]));
    return normal_form(ctx, acc);
}

// Velocity induced on a covector p by the flow with characteristic phi:
// the evolutionary action on the entries plus the adjoint-linearization drift
// that keeps the coupling's time derivative expressible through the pairing.
inline Tuple lift_covector_velocity(const Context& ctx, const Tuple& phi, const Tuple& p) {
    if (static_cast<int>(p.size()) != ctx.gens) throw error("covector has wrong number of components");
    Tuple drift = apply_operator(ctx, adjoint(ctx, linearize(ctx, phi)), p);
    Tuple r;
    r.reserve(p.size());
    for (int j = 0; j < ctx.gens; ++j)
        r.push_back(evolutionary(ctx, Family::A, phi, p[static_cast<size_t>(j)]) +
                    drift[static_cast<size_t>(j)]);
    return r;
}

} // namespace ncvar
