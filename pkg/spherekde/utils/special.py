# spherekde/utils/special.py
# Overflow-free exponential integrals over the unit sphere.

import numpy as np
from scipy import special

from spherekde.geometry import surface_area

# Below this norm the removable singularity of sinh(s)/s (or I_nu(s)/s^nu) is
# replaced by its two-term Taylor expansion.
TAYLOR_SWITCH = 1e-4


def scaled_sphere_exp_integral(norm, excess, d: int = 3):
    """Return e^{-(s + excess)} * integral over S^{d-1} of e^{v.x}, with s = |v|.

    Callers pass `excess = shift - s >= 0` already computed in a cancellation-free
    way, so every exponential below has a nonpositive argument. For d = 3 the
    integral is 4*pi*sinh(s)/s; otherwise (2*pi)^{nu+1} I_nu(s) / s^nu, nu = d/2 - 1,
    evaluated with the exponentially scaled Bessel function.
    """
    s = np.asarray(norm, dtype=float)
    excess = np.asarray(excess, dtype=float)
    s, excess = np.broadcast_arrays(s, excess)
    small = s < TAYLOR_SWITCH
    s_safe = np.where(small, 1.0, s)

    # far-apart pairs underflow to zero in both branches
    with np.errstate(under="ignore"):
        if d == 3:
            # e^{s - shift} (1 - e^{-2s}) / (2s) = e^{-shift} sinh(s)/s
            regular = 4.0 * np.pi * np.exp(-excess) * (-np.expm1(-2.0 * s_safe)) / (2.0 * s_safe)
            series = 4.0 * np.pi * np.exp(-excess - s) * (1.0 + s * s / 6.0)
        else:
            nu = 0.5 * d - 1.0
            regular = (
                (2.0 * np.pi) ** (nu + 1.0)
                * special.ive(nu, s_safe)
                * np.exp(-excess)
                / s_safe**nu
            )
            series = surface_area(d) * np.exp(-excess - s) * (1.0 + s * s / (2.0 * d))

    out = np.where(small, series, regular)
    return out if out.ndim else float(out)

