#pragma once

#include "rational.hpp"

namespace ncvar {

// Letter families. A is even, B is odd. P1..P4 are auxiliary even families
// used for formal covector arguments (inert placeholders: no derivative
// structure beyond the jet grading, never produced by the core operations).
enum class Family : unsigned char { A = 0, B = 1, P1 = 2, P2 = 3, P3 = 4, P4 = 5 };

inline bool family_odd(Family f) { return f == Family::B; }

inline const char* family_name(Family f) {
    switch (f) {
        case Family::A: return "a";
        case Family::B: return "b";
        case Family::P1: return "p";
        case Family::P2: return "q";
        case Family::P3: return "r";
        case Family::P4: return "s";
    }
    return "?";
}

inline Family slot_family(int slot) {
    switch (slot) {
        case 0: return Family::P1;
        case 1: return Family::P2;
        case 2: return Family::P3;
        case 3: return Family::P4;
    }
    throw error("slot index out of range (at most 4 formal argument families)");
}

// Session configuration: number of generator pairs per family, number of
// base coordinates, and whether the graded-commutative quotient is in force.
struct Context {
    int gens = 1;
    int base_dim = 1;
    bool commutative = false;

    Context() = default;
    Context(int m, int n, bool comm = false) : gens(m), base_dim(n), commutative(comm) {
        if (m < 1) throw error("context: gens must be >= 1");
        if (n < 1) throw error("context: base_dim must be >= 1");
    }
};

} // namespace ncvar
