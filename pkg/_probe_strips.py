"""Probe: strip-window feasibility for seed-0 boson movers.

For each coarse factor mx in {1, 2} and each zero-spin charge, ask the
confined solver for an x-mover supported on a height-1 strip of width
2/4/6 and a y-mover on the transposed strip, at every monomial shift in
a radius-2 window.
"""
import sys
import time

from stabdecomp.laurent import LaurentPoly
from stabdecomp.codes import StabilizerCode
from stabdecomp.extraction import (
    _confined_movers,
    _seat_boson,
    _shift_order,
    _xy_poly,
    annihilator_normalize,
)
from stabdecomp.anyons import echelon_charge_rows, spin_table
from stabdecomp.errors import ScaleRetry

sys.path.insert(0, ".")
from _stress import rand_code  # noqa: E402


def strip(q, axis, offs, skip=()):
    if axis == "x":
        cell = frozenset((a, 0) for a in offs)
    else:
        cell = frozenset((0, a) for a in offs)
    return [frozenset() if c in skip else cell for c in range(2 * q)]


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    code = rand_code(seed)
    work, _ = annihilator_normalize(code)
    p = work.p
    for mx in (1, 2):
        att = work if mx == 1 else work.coarse_grain(mx)
        base, charge_rows, _ = echelon_charge_rows(att)
        table = spin_table(base)
        k = table.k
        print(f"mx={mx} q={base.q} k={k}")
        n_cand = 0
        for v in range(1, p ** k):
            coords = tuple((v // p ** i) % p for i in range(k))
            if table.theta_of(coords) != 0:
                continue
            n_cand += 1
            if n_cand > 12:
                break
            mv = table.movers_of(coords)
            seated, r0, _ = _seat_boson(base, charge_rows, mv.e, movers=mv)
            rep = [LaurentPoly.zero(p)] * seated.t
            rep[r0] = LaurentPoly.one(p)
            for offs in ((0, 1), (-1, 0, 1, 2), (-2, -1, 0, 1, 2, 3)):
                t0 = time.time()
                hitx = hity = None
                for a, b in _shift_order(2):
                    mono = LaurentPoly.monomial(p, a, b, 1)
                    sh = [mono * f for f in rep]
                    if hitx is None:
                        try:
                            _confined_movers(
                                seated, sh,
                                [(_xy_poly(p, "x"),
                                  strip(seated.q, "x", offs))])
                            hitx = (a, b)
                        except ScaleRetry:
                            pass
                    if hity is None:
                        try:
                            _confined_movers(
                                seated, sh,
                                [(_xy_poly(p, "y"),
                                  strip(seated.q, "y", offs))])
                            hity = (a, b)
                        except ScaleRetry:
                            pass
                    if hitx and hity:
                        break
                dt = time.time() - t0
                print(f"  cand{n_cand} {coords} w={len(offs)}: "
                      f"x@{hitx} y@{hity} ({dt:.1f}s)")
                if hitx and hity:
                    break


main()
