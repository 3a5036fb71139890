#include "sksv/portable_math.hpp"

#include <cmath>
#include <limits>

namespace sksv::portable {

double log(double x) noexcept {
    if (!(x > 0.0)) {
        return x == 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isinf(x)) {
        return x;
    }
    // x = f * 2^e with f in [sqrt(1/2), sqrt(2)); frexp and ldexp are exact.
    int e = 0;
    double f = std::frexp(x, &e);
    if (f < 0.70710678118654752440) {
        f = std::ldexp(f, 1);
        --e;
    }
    // log f = 2 atanh(t), t = (f - 1) / (f + 1), |t| <= 0.1716.
    const double t = (f - 1.0) / (f + 1.0);
    const double t2 = t * t;
    double series = 1.0 / 29.0;
    for (int d = 27; d >= 1; d -= 2) {
        series = series * t2 + 1.0 / d;
    }
    const double log_f = 2.0 * t * series;
    // ln 2 split so that e * kLn2Hi is exact for |e| < 2^11.
    constexpr double kLn2Hi = 6.93147180369123816490e-01;
    constexpr double kLn2Lo = 1.90821492927058770002e-10;
    const double de = static_cast<double>(e);
    return de * kLn2Hi + (log_f + de * kLn2Lo);
}

} // namespace sksv::portable
