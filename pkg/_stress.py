import random
import sys
import time
import faulthandler

import stabdecomp.extraction as ex
from stabdecomp.codes import HGate, CPGate, CXGate, MulGate, direct_sum
from stabdecomp.laurent import LaurentPoly
from stabdecomp.corpus import toric_stack, trivial

if __name__ == "__main__":
    faulthandler.dump_traceback_later(
        int(sys.argv[2]) if len(sys.argv) > 2 else 110, exit=True)


def rand_poly(rng, p, maxterms=2):
    terms = {}
    for _ in range(rng.randint(1, maxterms)):
        a, b = rng.choice((-1, 0, 1)), rng.choice((-1, 0, 1))
        c = rng.randint(1, p - 1)
        terms[(a, b)] = (terms.get((a, b), 0) + c) % p
    f = LaurentPoly(p, terms)
    return f if not f.is_zero() else LaurentPoly.one(p)


def rand_word(rng, p, q, depth=3):
    ops = []
    for _ in range(depth):
        for _ in range(q):
            kind = rng.randrange(4)
            i = rng.randrange(q)
            j = rng.randrange(q)
            if kind == 0:
                ops.append(HGate(i))
            elif kind == 1:
                ops.append(CPGate(i, j, rand_poly(rng, p)))
            elif kind == 2 and i != j:
                ops.append(CXGate(i, j, rand_poly(rng, p)))
            elif p > 2:
                ops.append(MulGate(i, rng.randint(2, p - 1)))
    return ops


def rand_case(seed):
    rng = random.Random(seed)
    n = rng.choice((1, 2))
    p = rng.choice((2, 3, 5))
    qtriv = rng.choice((1, 2))
    code = direct_sum(toric_stack(n, p), trivial(qtriv, p))
    for op in rand_word(rng, p, code.q):
        code = code.apply_op(op)
    return code, n, p, qtriv


def rand_code(seed):
    return rand_case(seed)[0]


if __name__ == "__main__":
    seed = int(sys.argv[1])
    code, n, p, qtriv = rand_case(seed)
    code.check_commuting()
    t0 = time.time()
    try:
        res = ex.decompose(code)
        ok = 'OK' if res.n == n else 'WRONG'
        print(f'seed {seed}: n={n} p={p} qt={qtriv} -> n={res.n} '
              f'm={res.m} {ok} {time.time()-t0:.1f}s', flush=True)
    except Exception as e:
        print(f'seed {seed}: n={n} p={p} qt={qtriv} -> '
              f'{type(e).__name__}: {e} {time.time()-t0:.1f}s', flush=True)
