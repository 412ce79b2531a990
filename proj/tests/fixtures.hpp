#pragma once

#include "cayley/measure.hpp"

namespace fixture {

using namespace cayley;

inline Rational q(long p, long d = 1) { return Rational(p, d); }

inline CylinderField binary_field(unsigned k = 2) {
    return CylinderField(Space{TreeGeometry(k), SpinSet::finite(2)});
}

inline CylinderField naturals_field(unsigned k = 2) {
    return CylinderField(Space{TreeGeometry(k), SpinSet::naturals()});
}

/// lambda = (1/2, 1/2), P = ((2/3, 1/3), (1/3, 2/3)).
inline MeasureFamily sticky_chain(const CylinderField& f) {
    return markov_family(f, WeightSequence({q(1, 2), q(1, 2)}),
                         TransitionKernel({WeightSequence({q(2, 3), q(1, 3)}), WeightSequence({q(1, 3), q(2, 3)})}));
}

inline MeasureFamily uniform_product(const CylinderField& f) {
    return product_family(f, WeightSequence({q(1, 2), q(1, 2)}));
}

/// lambda = 1 everywhere, P(q, r) = 2^-(r+1) for every q.
inline MeasureFamily counting_root_chain(const CylinderField& f) {
    return markov_family(f, WeightSequence({}, Tail::constant(1)),
                         TransitionKernel({}, WeightSequence({}, Tail::geometric(q(1, 2), q(1, 2)))));
}

}  // namespace fixture
