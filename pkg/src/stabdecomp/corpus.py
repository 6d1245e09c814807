"""Built-in reference codes.

Each entry returns a verified StabilizerCode.  Expected analysis
outcomes (charge count k, toric summands n, unit-cell factor m, torus
logical counts) are recorded here as fixtures; the test suite re-derives
every number instead of trusting the table.
"""

from __future__ import annotations

import re

from .codes import StabilizerCode, direct_sum
from .laurent import LaurentPoly, parse_poly
from .polymat import PolyMatrix

TORIC_PRIMES = (2, 3, 5, 7)


def toric(p: int) -> StabilizerCode:
    """The Z_p discrete-gauge code on one plaquette/vertex pair per cell.

    Generator 1 is the Z-type (plaquette) term, generator 2 the X-type
    (vertex) term; q = 2 with the qudits on the two edge orientations.
    """
    cols = [
        ["0", "0", "1 - x^-1", "1 - y^-1"],
        ["y - 1", "1 - x", "0", "0"],
    ]
    sigma = PolyMatrix.from_cols(
        p, 4, [[parse_poly(p, s) for s in col] for col in cols]
    )
    return StabilizerCode(p, 2, sigma, name=f"toric({p})")


def trivial(q: int, p: int) -> StabilizerCode:
    """Z on every qudit of the cell; stabilizes a product state."""
    z = LaurentPoly.zero(p)
    one = LaurentPoly.one(p)
    sig = [[z] * q for _ in range(2 * q)]
    for j in range(q):
        sig[q + j][j] = one
    return StabilizerCode(p, q, PolyMatrix(p, sig), name=f"trivial({q},{p})")


def toric_stack(n: int, p: int) -> StabilizerCode:
    if n < 1:
        raise ValueError("stack needs n >= 1")
    code = toric(p)
    for _ in range(n - 1):
        code = direct_sum(code, toric(p))
    code.name = f"toric_stack({n},{p})"
    return code


def wen_plaquette() -> StabilizerCode:
    """Single checkerboard generator, q = 1, p = 2.

    The two charge species live on the two sublattices and are swapped
    by unit translation, so the unit cell must be doubled before each
    species has its own movers.
    """
    p = 2
    sigma = PolyMatrix.from_cols(
        p, 2, [[parse_poly(p, "1 + x*y"), parse_poly(p, "x + y")]]
    )
    return StabilizerCode(p, 1, sigma, name="wen_plaquette")


def color_666() -> StabilizerCode:
    """Hexagonal-lattice color code (6.6.6), p = 2, on a brick-wall cell.

    The cell carries six qubits (two three-qubit sublattices A and B);
    each of the three face colors contributes one X-type and one Z-type
    generator supported on the same six-qubit hexagon.
    """
    p = 2
    faces = [
        ["1", "1", "x^-1", "1", "x^-1", "x^-1"],
        ["y", "1", "1", "y", "1", "x^-1"],
        ["x*y", "y", "1", "y", "y", "1"],
    ]
    zero = LaurentPoly.zero(p)
    cols = []
    for face in faces:  # X-type generators
        polys = [parse_poly(p, s) for s in face]
        cols.append(polys + [zero] * 6)
    for face in faces:  # Z-type generators
        polys = [parse_poly(p, s) for s in face]
        cols.append([zero] * 6 + polys)
    sigma = PolyMatrix.from_cols(p, 12, cols)
    return StabilizerCode(p, 6, sigma, name="color_666")


# Names the CLI lists; parametric families are shown with their shipped
# instantiations.  Expected values: k (charge dimension), n (toric
# summands), m (normalization factor), logical (torus count at L >= 4,
# measured on the m-coarse-grained code).
CORPUS_EXPECTED = {
    "toric(2)": dict(k=2, n=1, m=1, logical=2),
    "toric(3)": dict(k=2, n=1, m=1, logical=2),
    "toric(5)": dict(k=2, n=1, m=1, logical=2),
    "toric(7)": dict(k=2, n=1, m=1, logical=2),
    "trivial(1,2)": dict(k=0, n=0, m=1, logical=0),
    "trivial(3,5)": dict(k=0, n=0, m=1, logical=0),
    "toric_stack(2,2)": dict(k=4, n=2, m=1, logical=4),
    "toric_stack(2,3)": dict(k=4, n=2, m=1, logical=4),
    "toric_stack(3,3)": dict(k=6, n=3, m=1, logical=6),
    "wen_plaquette": dict(k=2, n=1, m=2, logical=2),
    "color_666": dict(k=4, n=2, m=1, logical=4),
}

_PATTERNS = [
    (re.compile(r"^toric\((\d+)\)$"), lambda m: toric(int(m.group(1)))),
    (
        re.compile(r"^trivial\((\d+),(\d+)\)$"),
        lambda m: trivial(int(m.group(1)), int(m.group(2))),
    ),
    (
        re.compile(r"^toric_stack\((\d+),(\d+)\)$"),
        lambda m: toric_stack(int(m.group(1)), int(m.group(2))),
    ),
    (re.compile(r"^wen_plaquette$"), lambda m: wen_plaquette()),
    (re.compile(r"^color_666$"), lambda m: color_666()),
]


def corpus_get(name: str) -> StabilizerCode:
    compact = name.replace(" ", "")
    for pat, build in _PATTERNS:
        mo = pat.match(compact)
        if mo:
            if pat.pattern.startswith("^toric\\(") and int(mo.group(1)) not in TORIC_PRIMES:
                raise KeyError(f"toric(p) ships for p in {TORIC_PRIMES}, not {name!r}")
            return build(mo)
    raise KeyError(f"unknown corpus code {name!r}")


def corpus_list():
    return list(CORPUS_EXPECTED)
