import numpy as np
from hypothesis import given, settings, strategies as st

from stabdecomp.fplin import in_colspace, inv, kernel, rank, rref, solve

PRIMES = [2, 3, 5, 7]


def mat_strategy(p, max_dim=5):
    return st.tuples(
        st.integers(min_value=1, max_value=max_dim),
        st.integers(min_value=1, max_value=max_dim),
        st.randoms(use_true_random=False),
    ).map(
        lambda rnc: np.array(
            [
                [rnc[2].randrange(p) for _ in range(rnc[1])]
                for _ in range(rnc[0])
            ],
            dtype=np.int64,
        )
    )


any_mat = st.sampled_from(PRIMES).flatmap(
    lambda p: st.tuples(st.just(p), mat_strategy(p))
)


def test_rref_basic():
    A = np.array([[2, 4], [1, 2]])
    R, piv = rref(A, 5)
    assert piv == [0]
    assert np.array_equal(R, np.array([[1, 2], [0, 0]]))


def test_rref_ops_replay():
    A = np.array([[0, 1, 2], [3, 4, 5], [6, 0, 1]])
    p = 7
    R, piv, ops = rref(A, p, want_ops=True)
    B = A.copy() % p
    for op in ops:
        if op[0] == "swap":
            B[[op[1], op[2]]] = B[[op[2], op[1]]]
        elif op[0] == "scale":
            B[op[1]] = B[op[1]] * op[2] % p
        else:
            B[op[1]] = (B[op[1]] + op[3] * B[op[2]]) % p
    assert np.array_equal(B, R)


@settings(max_examples=60)
@given(any_mat)
def test_rank_kernel_dimension(pm):
    p, A = pm
    r = rank(A, p)
    K = kernel(A, p)
    assert r + K.shape[0] == A.shape[1]
    if K.shape[0]:
        assert not np.any(A.dot(K.T) % p)
        # basis rows are independent
        assert rank(K, p) == K.shape[0]


@settings(max_examples=60)
@given(any_mat)
def test_solve_consistent_systems(pm):
    p, A = pm
    x0 = np.arange(A.shape[1]) % p
    b = A.dot(x0) % p
    x = solve(A, b, p)
    assert x is not None
    assert np.array_equal(A.dot(x) % p, b)
    assert in_colspace(A, b, p)


def test_solve_inconsistent():
    A = np.array([[1, 1], [1, 1]])
    assert solve(A, np.array([1, 2]), 3) is None


def test_inv_roundtrip():
    p = 5
    A = np.array([[1, 2, 0], [0, 1, 4], [3, 0, 2]])
    B = inv(A, p)
    assert np.array_equal(A.dot(B) % p, np.eye(3, dtype=np.int64))
    singular = np.array([[1, 2], [2, 4]])
    try:
        inv(singular, p)
        raise AssertionError("expected singular failure")
    except ValueError:
        pass


def test_identity_and_zero_edge_cases():
    assert rank(np.eye(4, dtype=np.int64), 2) == 4
    assert kernel(np.eye(4, dtype=np.int64), 2).shape[0] == 0
    Z = np.zeros((3, 5), dtype=np.int64)
    assert rank(Z, 3) == 0
    assert kernel(Z, 3).shape[0] == 5
