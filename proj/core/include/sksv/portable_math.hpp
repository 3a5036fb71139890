#pragma once

namespace sksv::portable {

// Natural logarithm built only from IEEE-754 basic operations, so results do
// not depend on the platform libm. Accurate to a few ulp for finite x > 0.
double log(double x) noexcept;

} // namespace sksv::portable
