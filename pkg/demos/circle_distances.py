"""Spectral distances between point masses on the truncated circle.

Prints the solver value for delta_0 against delta_theta next to the arc
length for a few truncation sizes.  N = 32 takes about half a minute.
"""

import argparse
import math
import time

from toeplitz_triples import build_circle, connes_distance, delta_state, lip_a_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--restarts", type=int, default=2)
    args = ap.parse_args()

    thetas = (math.pi / 4, math.pi / 2, math.pi)
    print(f"{'N':>4} " + " ".join(f"{'theta=' + format(t, '.4f'):>16}" for t in thetas) + f" {'time':>7}")
    for n in args.sizes:
        c = build_circle(n)
        spec = lip_a_spec(c)
        start = time.perf_counter()
        vals = []
        for th in thetas:
            res = connes_distance(delta_state(c, 0.0), delta_state(c, th), spec,
                                  restarts=args.restarts, init=[c.potential_coords(0.0, th)])
            vals.append(res.value)
        print(f"{n:>4} " + " ".join(f"{v:>16.5f}" for v in vals) + f" {time.perf_counter() - start:>6.1f}s")
    print(f"{'arc':>4} " + " ".join(f"{t:>16.5f}" for t in thetas))


if __name__ == "__main__":
    main()
