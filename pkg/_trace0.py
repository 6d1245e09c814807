import random
import sys
import time

import stabdecomp.extraction as ex
from stabdecomp.codes import direct_sum, DropGen
from stabdecomp.corpus import toric_stack, trivial
from stabdecomp.errors import ScaleRetry, StabDecompError
from _stress import rand_word

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
rng = random.Random(seed)
n = rng.choice((1, 2)); p = rng.choice((2, 3, 5)); qtriv = rng.choice((1, 2))
code = direct_sum(toric_stack(n, p), trivial(qtriv, p))
for op in rand_word(rng, p, code.q):
    code = code.apply_op(op)

work = code
for i in sorted(work.zero_generator_indices(), reverse=True):
    work = work.apply_op(DropGen(i))
t0 = time.time()
m, work = ex.annihilator_normalize(work, m_cap=16)
print(f"normalize: m={m} q={work.q} t={work.t} ({time.time()-t0:.1f}s)",
      flush=True)
base = work

mx = 1
while m * mx <= 16:
    deltas = sorted(((dx, dy) for dx in range(mx) for dy in range(mx)),
                    key=lambda d: (max(d), d))
    for d in deltas[:25]:
        t0 = time.time()
        attempt = base
        if mx > 1:
            attempt = attempt.coarse_grain(mx)
        if d != (0, 0):
            attempt, _ = ex._apply_subcell_shift(attempt, mx, d[0], d[1])
        try:
            n_, ops_, rem_ = ex._extract_all(attempt, None)
            print(f"mx={mx} d={d}: SUCCESS n={n_} ({time.time()-t0:.1f}s)",
                  flush=True)
            sys.exit(0)
        except ScaleRetry as e:
            print(f"mx={mx} d={d}: retry ({time.time()-t0:.1f}s): "
                  f"{str(e)[:80]}", flush=True)
        except StabDecompError as e:
            print(f"mx={mx} d={d}: HARD FAIL ({time.time()-t0:.1f}s): "
                  f"{type(e).__name__} {str(e)[:80]}", flush=True)
            sys.exit(1)
    mx *= 2
print("ladder exhausted", flush=True)
