#ifndef KGSYM_LAMBERT_HPP
#define KGSYM_LAMBERT_HPP

#include <stdexcept>

namespace kgsym {

/// Principal-branch Lambert W on [-1/e, inf): the inverse of w -> w e^w.
/// Halley iteration from a piecewise initial guess; satisfies
/// |w e^w - x| < 1e-14 * max(1, |x|). Throws std::domain_error below -1/e.
double lambert_w(double x);

}  // namespace kgsym

#endif
