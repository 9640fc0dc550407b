"""Complex log-gamma by the Lanczos approximation.

Only what the connection formula needs: ``arg Gamma(i y)`` for real y.
"""

import cmath
import math

# g = 7, n = 9 coefficients (Godfrey); relative error ~1e-15 for Re z >= 1/2
_G = 7.0
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def loggamma(z: complex) -> complex:
    """Principal branch of log Gamma(z), continuous on Re z > 0.

    For Re z < 1/2 the recurrence Gamma(z) = Gamma(z + m) / (z (z+1) ... (z+m-1))
    moves the argument into the region where the series is accurate; the
    product is accumulated as a sum of logarithms so the imaginary part
    stays on the continuous branch.
    """
    z = complex(z)
    shift = 0j
    while z.real < 0.5:
        if z == 0 or (z.imag == 0 and z.real == int(z.real)):
            raise ValueError("log-gamma pole")
        shift += cmath.log(z)
        z += 1
    zm = z - 1
    s = _COEF[0]
    for k in range(1, len(_COEF)):
        s += _COEF[k] / (zm + k)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * cmath.log(t) - t + cmath.log(s) - shift


def arg_gamma_imag(y: float) -> float:
    """arg Gamma(i y) on the branch continuous from y > 0 small (not reduced mod 2 pi)."""
    if y == 0:
        raise ValueError("Gamma has a pole at 0")
    return loggamma(complex(0.0, y)).imag
