"""Independent reference implementations used as test oracles.

These deliberately use different mechanics from the library code (explicit
permutation matrices and python loops instead of einsum/reshape paths).
"""

from __future__ import annotations

import numpy as np


def permutation_matrix(dims, perm) -> np.ndarray:
    """P with (P x)[new multi-index] = x[old multi-index], new order = perm."""
    d = int(np.prod(dims))
    p = np.zeros((d, d), dtype=np.complex128)
    for old in range(d):
        digits = []
        rem = old
        for size in reversed(dims):
            digits.append(rem % size)
            rem //= size
        digits.reverse()
        new = 0
        for j in perm:
            new = new * dims[j] + digits[j]
        p[new, old] = 1.0
    return p


def apply_kraus_on_factors_bigmatrix(mat, dims, sel, kraus, out_dims):
    """Reference for applying a Kraus family on selected tensor factors.

    Builds the padded Kraus operators explicitly as (P_out)^dagger (K (x) I) P_in
    with dense permutation matrices.  Output factor order matches the library
    convention: remaining factors first (original order), outputs appended.
    """
    dims = list(dims)
    k = len(dims)
    rest = [i for i in range(k) if i not in sel]
    p_in = permutation_matrix(dims, list(sel) + rest)  # selected block first
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    out = None
    eye = np.eye(d_rest, dtype=np.complex128)
    new_dims = [dims[i] for i in rest] + list(out_dims)
    d_out = int(np.prod(out_dims)) if len(out_dims) else 1
    # after p_in the layout is (sel, rest); we want outputs appended at the end
    p_out = permutation_matrix([d_out, d_rest], [1, 0])
    for op in kraus:
        big = p_out @ np.kron(op, eye) @ p_in
        term = big @ mat @ big.conj().T
        out = term if out is None else out + term
    return out, tuple(new_dims)


def feedback_dist_treewalk(strategy, channel) -> np.ndarray:
    """Exhaustive per-history product of traces (plain python loops)."""
    y = channel.n_outcomes
    n = strategy.n
    probs = np.zeros(y**n)
    for idx in range(y**n):
        digits = []
        rem = idx
        for _ in range(n):
            digits.append(rem % y)
            rem //= y
        digits.reverse()
        p = 1.0
        for t in range(n):
            hist = tuple(digits[:t])
            rho = strategy.state_at(hist)
            p *= float(np.trace(rho @ channel.povm[digits[t]]).real)
        probs[idx] = p
    return probs


def general_strategy_dist(strategy, channel) -> np.ndarray:
    """Joint output law of an ancilla protocol via explicit branch recursion."""
    import itertools

    a = strategy.ancilla_dim
    d = strategy.d
    y = strategy.y_size
    n = strategy.n

    def branch(hist, sigma):
        t = len(hist) + 1
        if t > n:
            return {(): 1.0}
        phi = strategy.maps[t - 1]
        if t > 1:
            reg = np.zeros((y ** (t - 1), y ** (t - 1)), dtype=np.complex128)
            i = 0
            for letter in hist:
                i = i * y + letter
            reg[i, i] = 1.0
            joint = np.kron(reg, sigma)
        else:
            joint = sigma
        out = phi.apply_mat(joint)
        result = {}
        for letter in range(y):
            # Tr_H[(1 (x) M_letter) out] entry-wise with loops
            post = np.zeros((a, a), dtype=np.complex128)
            p = 0.0
            for i in range(a):
                for j in range(a):
                    block = out[i * d : (i + 1) * d, j * d : (j + 1) * d]
                    val = np.trace(channel.povm[letter] @ block)
                    post[i, j] = val
                    if i == j:
                        p += float(val.real)
            if p <= 1e-15:
                for rest in itertools.product(range(y), repeat=n - t):
                    result[(letter,) + rest] = 0.0
                continue
            sub = branch(hist + (letter,), post / p)
            for rest, q in sub.items():
                result[(letter,) + rest] = p * q
        return result

    table = branch((), strategy.sigma0.mat)
    probs = np.zeros(y**n)
    for word, p in table.items():
        i = 0
        for letter in word:
            i = i * y + letter
        probs[i] = p
    return probs


def eval_id_errors_loops(states, decoders, channel=None) -> tuple[float, float]:
    """Double-loop evaluation of both error kinds (no vectorisation)."""
    outs = []
    for rho in states:
        mat = rho if channel is None else channel.apply_mat(rho)
        outs.append(mat)
    n = len(outs)
    l1 = 0.0
    l2 = 0.0
    for i in range(n):
        l1 = max(l1, 1.0 - float(np.trace(outs[i] @ decoders[i]).real))
        for j in range(n):
            if i != j:
                l2 = max(l2, float(np.trace(outs[i] @ decoders[j]).real))
    return max(l1, 0.0), max(l2, 0.0)
