"""Both parameter degenerations on a small circle instance.

beta -> 0: distances between states with different normal parts grow
like gamma / beta.  alpha -> 0: the pairing bound alpha (diam_A + diam_C)
shrinks linearly while the sampled pairing value stays below it.
"""

import math

import numpy as np

from toeplitz_triples import Params, build_circle, delta_state, random_state
from toeplitz_triples.bounds import ato0_pairing_check, dineq_divergence_check


def main():
    rng = np.random.default_rng(1)
    c = build_circle(4)
    phi, psi = random_state(c, rng), random_state(c, rng)

    res = dineq_divergence_check(c, phi, psi, [1.0, 0.5, 0.25, 0.125])
    print(f"gamma = {res.gamma:.5f}")
    print(f"{'beta':>8} {'gamma/beta':>12} {'witness value':>14}")
    for r in res.reports:
        print(f"{r.context['beta']:>8.3f} {r.lhs:>12.5f} {r.rhs:>14.5f}")

    sigma = delta_state(c, 0.0)
    print()
    print(f"{'alpha':>8} {'pairing':>10} {'bound':>10}")
    for alpha in (0.5, 0.1, 0.01):
        rep = ato0_pairing_check(c, phi, Params(alpha, 1), sigma, 1e6, 2 * math.pi, rng=rng)
        print(f"{alpha:>8.2f} {rep.lhs:>10.5f} {rep.rhs:>10.5f}")


if __name__ == "__main__":
    main()
