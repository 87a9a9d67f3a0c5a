#pragma once

#include <string_view>

#include "belltk/bellbasis.hpp"
#include "belltk/hilbert.hpp"

namespace belltk {

enum class Party { kA, kB };

std::string_view to_string(Party p);
Party parse_party(std::string_view text);

// Rotated Dove prism: |l> -> exp(2 i l alpha) |l> on the window's physical labels.
Operator dove_prism(double alpha, const ModeWindow& window);

// diag(exp(2 pi i n k / d)).
Operator pauli_z(int d, int n);

// Cyclic shift X|k> = |k + 1 mod d>.
Operator pauli_x(int d);

// (g x I) or (I x g) on a d*d joint state.
PureState apply_local(const Operator& g, Party party, const PureState& joint);

// |<a|b>| >= 1 - tolerance.
bool equal_up_to_global_phase(const PureState& a, const PureState& b, double tolerance);

// Dove angle that realizes Z^n on the given party up to a global phase, for a
// contiguous window. Acting on B reverses the phase ramp, so the angle flips sign.
double dove_angle_for_phase_class(int n, int d, Party party);

}  // namespace belltk
