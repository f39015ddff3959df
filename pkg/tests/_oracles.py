"""Hand-derived closed forms used as independent oracles by several test
modules.

expected_pair_defects assembles, for the canonical single-generator bases,
every basis-pair commutator defect directly from the acceleration Jacobians
and the four condition tensors.  The derivations were done separately from
the bracket engine, so agreement is a genuine cross-check rather than a
self-comparison.
"""

import numpy as np

from wlcheck.anomaly import condition_residuals
from wlcheck.phasespace import accel_jacobians


def expected_pair_defects(spec, law, p):
    n = law.n_particles
    _a_val, dx, dv = accel_jacobians(law, p)
    cond = condition_residuals(law, p)
    x = np.asarray(p.x, dtype=float)

    def flat(eta):
        out = np.zeros(6 * n)
        out[3 * n:] = np.asarray(eta).reshape(-1)
        return out

    names = spec.basis_names
    out = {}
    for ai, an in enumerate(names):
        for bi in range(ai + 1, len(names)):
            bn = names[bi]
            eta = np.zeros((n, 3))
            if an[0] == "P" and bn == "H":
                eta = dx[:, :, :, int(an[1]) - 1].sum(axis=2)
            elif an[0] == "J" and bn == "H":
                eta = cond["II"][:, int(an[1]) - 1, :]
            elif an == "H" and bn[0] == "G":
                eta = dv[:, :, :, int(bn[1]) - 1].sum(axis=2)
            elif an[0] == "P" and bn[0] == "K":
                i, j = int(an[1]) - 1, int(bn[1]) - 1
                eta = x[:, j][:, None] * dx[:, :, :, i].sum(axis=2)
            elif an[0] == "J" and bn[0] == "K":
                i, j = int(an[1]) - 1, int(bn[1]) - 1
                eta = x[:, j][:, None] * cond["II"][:, i, :]
            elif an == "H" and bn[0] == "K":
                eta = cond["IIIP"][:, int(bn[1]) - 1, :]
            elif an[0] == "K" and bn[0] == "K":
                i, j = int(an[1]) - 1, int(bn[1]) - 1
                eta = x[:, i][:, None] * cond["IIIP"][:, j, :] \
                    - x[:, j][:, None] * cond["IIIP"][:, i, :]
            out[(ai, bi)] = flat(eta)
    return out
