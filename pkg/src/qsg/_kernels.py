"""Hot numeric kernels: gate application, outcome sampling, round scoring.

Two interchangeable implementations exist, a pure-numpy one and a numba
``@njit`` one.  ``QSG_BACKEND=numpy`` or ``QSG_BACKEND=numba`` forces a
choice; the default is numba when it imports, numpy otherwise.  ``BACKEND``
names the active implementation.

Conventions shared by every kernel:

* state vectors are contiguous complex128 arrays of length ``2**n``; basis
  index bit ``q`` is qubit ``q`` (qubit 0 is the least significant bit),
* a k-qubit gate matrix ``u`` is ``2**k x 2**k`` with matrix index bit ``j``
  acting on ``targets[j]`` (``targets[0]`` is the least significant bit),
* density matrices are Hermitian; the two-sided products exploit this.
"""

from __future__ import annotations

import os

import numpy as np

_KERNEL_NAMES = (
    "apply_1q",
    "apply_2q",
    "apply_1q_cols",
    "apply_2q_cols",
    "sample_indices",
    "sample_action_bits",
    "score_rounds",
)


# ---------------------------------------------------------------------------
# numpy implementation


def _np_apply_1q(state, u, target, n):
    # view as (high bits, target bit, low bits); C order puts bit `target`
    # on the middle axis exactly when the last axis has length 2**target
    s = state.reshape(-1, 2, 1 << target)
    out = np.empty_like(s)
    out[:, 0, :] = u[0, 0] * s[:, 0, :] + u[0, 1] * s[:, 1, :]
    out[:, 1, :] = u[1, 0] * s[:, 0, :] + u[1, 1] * s[:, 1, :]
    return out.reshape(state.shape[0])


def _np_apply_kq(state, u, targets, n):
    k = len(targets)
    s = state.reshape((2,) * n)
    # axis of qubit q is (n - 1 - q); most significant matrix bit first
    src = [n - 1 - q for q in targets[::-1]]
    s = np.moveaxis(s, src, range(k))
    shape = s.shape
    s = u @ s.reshape(1 << k, -1)
    s = np.moveaxis(s.reshape(shape), range(k), src)
    return np.ascontiguousarray(s).reshape(1 << n)


def _np_apply_2q(state, u, t0, t1, n):
    return _np_apply_kq(state, u, (t0, t1), n)


def _np_apply_kq_cols(mat, u, targets, n):
    d, m = mat.shape
    k = len(targets)
    s = mat.reshape((2,) * n + (m,))
    src = [n - 1 - q for q in targets[::-1]]
    s = np.moveaxis(s, src, range(k))
    shape = s.shape
    s = u @ s.reshape(1 << k, -1)
    s = np.moveaxis(s.reshape(shape), range(k), src)
    return np.ascontiguousarray(s).reshape(d, m)


def _np_apply_1q_cols(mat, u, target, n):
    return _np_apply_kq_cols(mat, u, (target,), n)


def _np_apply_2q_cols(mat, u, t0, t1, n):
    return _np_apply_kq_cols(mat, u, (t0, t1), n)


def _np_sample_indices(cdf, uniforms):
    return np.searchsorted(cdf, uniforms, side="right").astype(np.int64)


def _np_sample_action_bits(cdf, uniforms, n_bits):
    idx = np.searchsorted(cdf, uniforms, side="right")
    return ((idx[:, None] >> np.arange(n_bits)) & 1).astype(np.uint8)


def _np_score_rounds(actions, defense):
    hits = (actions != defense[:, None]).sum(axis=1)
    return (2 * hits - actions.shape[1]).astype(np.int64)


def _build_numpy_impls():
    return {
        "apply_1q": _np_apply_1q,
        "apply_2q": _np_apply_2q,
        "apply_1q_cols": _np_apply_1q_cols,
        "apply_2q_cols": _np_apply_2q_cols,
        "sample_indices": _np_sample_indices,
        "sample_action_bits": _np_sample_action_bits,
        "score_rounds": _np_score_rounds,
    }


# ---------------------------------------------------------------------------
# numba implementation


def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def nb_apply_1q(state, u, target, n):
        d = state.shape[0]
        out = np.empty(d, dtype=np.complex128)
        mask = 1 << target
        for i in range(d):
            if i & mask:
                continue
            j = i | mask
            a0 = state[i]
            a1 = state[j]
            out[i] = u[0, 0] * a0 + u[0, 1] * a1
            out[j] = u[1, 0] * a0 + u[1, 1] * a1
        return out

    @njit(cache=True)
    def nb_apply_2q(state, u, t0, t1, n):
        out = np.empty(state.shape[0], dtype=np.complex128)
        m0 = 1 << t0
        m1 = 1 << t1
        s0 = t0 if t0 < t1 else t1
        s1 = t1 if t0 < t1 else t0
        low = (1 << s0) - 1
        mid = (1 << s1) - 1
        for j in range(1 << (n - 2)):
            t = (j & low) | ((j & ~low) << 1)
            base = (t & mid) | ((t & ~mid) << 1)
            i00 = base
            i01 = base | m0
            i10 = base | m1
            i11 = base | m0 | m1
            a0 = state[i00]
            a1 = state[i01]
            a2 = state[i10]
            a3 = state[i11]
            out[i00] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
            out[i01] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
            out[i10] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
            out[i11] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3
        return out

    @njit(cache=True)
    def nb_apply_1q_cols(mat, u, target, n):
        d, m = mat.shape
        out = np.empty((d, m), dtype=np.complex128)
        mask = 1 << target
        for i in range(d):
            if i & mask:
                continue
            j = i | mask
            for c in range(m):
                a0 = mat[i, c]
                a1 = mat[j, c]
                out[i, c] = u[0, 0] * a0 + u[0, 1] * a1
                out[j, c] = u[1, 0] * a0 + u[1, 1] * a1
        return out

    @njit(cache=True)
    def nb_apply_2q_cols(mat, u, t0, t1, n):
        d, m = mat.shape
        out = np.empty((d, m), dtype=np.complex128)
        m0 = 1 << t0
        m1 = 1 << t1
        s0 = t0 if t0 < t1 else t1
        s1 = t1 if t0 < t1 else t0
        low = (1 << s0) - 1
        mid = (1 << s1) - 1
        for j in range(1 << (n - 2)):
            t = (j & low) | ((j & ~low) << 1)
            base = (t & mid) | ((t & ~mid) << 1)
            i00 = base
            i01 = base | m0
            i10 = base | m1
            i11 = base | m0 | m1
            for c in range(m):
                a0 = mat[i00, c]
                a1 = mat[i01, c]
                a2 = mat[i10, c]
                a3 = mat[i11, c]
                out[i00, c] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
                out[i01, c] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
                out[i10, c] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
                out[i11, c] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3
        return out

    @njit(cache=True)
    def nb_sample_indices(cdf, uniforms):
        r = uniforms.shape[0]
        out = np.empty(r, dtype=np.int64)
        for i in range(r):
            u = uniforms[i]
            lo = 0
            hi = cdf.shape[0]
            # first index with cdf[idx] > u
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[mid] > u:
                    hi = mid
                else:
                    lo = mid + 1
            out[i] = lo
        return out

    @njit(cache=True)
    def nb_sample_action_bits(cdf, uniforms, n_bits):
        r = uniforms.shape[0]
        out = np.empty((r, n_bits), dtype=np.uint8)
        for i in range(r):
            u = uniforms[i]
            lo = 0
            hi = cdf.shape[0]
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[mid] > u:
                    hi = mid
                else:
                    lo = mid + 1
            for j in range(n_bits):
                out[i, j] = (lo >> j) & 1
        return out

    @njit(cache=True)
    def nb_score_rounds(actions, defense):
        r, n = actions.shape
        out = np.empty(r, dtype=np.int64)
        for i in range(r):
            s = 0
            d = defense[i]
            for j in range(n):
                if actions[i, j] != d:
                    s += 1
                else:
                    s -= 1
            out[i] = s
        return out

    return {
        "apply_1q": nb_apply_1q,
        "apply_2q": nb_apply_2q,
        "apply_1q_cols": nb_apply_1q_cols,
        "apply_2q_cols": nb_apply_2q_cols,
        "sample_indices": nb_sample_indices,
        "sample_action_bits": nb_sample_action_bits,
        "score_rounds": nb_score_rounds,
    }


# ---------------------------------------------------------------------------
# backend selection

_IMPL_CACHE: dict[str, dict] = {}


def implementations(name: str) -> dict:
    """Return the named implementation table ("numpy" or "numba")."""
    if name not in ("numpy", "numba"):
        raise ValueError(f"unknown backend {name!r}; expected 'numpy' or 'numba'")
    if name not in _IMPL_CACHE:
        if name == "numpy":
            _IMPL_CACHE[name] = _build_numpy_impls()
        else:
            _IMPL_CACHE[name] = _build_numba_impls()
    return _IMPL_CACHE[name]


def _resolve_backend() -> str:
    forced = os.environ.get("QSG_BACKEND", "").strip().lower()
    if forced == "numpy":
        return "numpy"
    if forced == "numba":
        implementations("numba")
        return "numba"
    if forced:
        raise ValueError(f"QSG_BACKEND={forced!r} not recognized; use 'numpy' or 'numba'")
    try:
        implementations("numba")
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()
_active = implementations(BACKEND)


def _c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def apply_matrix_state(state, u, targets, n):
    """Apply a k-qubit matrix to a statevector; returns a new array."""
    state = _c128(state)
    u = _c128(u)
    k = len(targets)
    if k == 1:
        return _active["apply_1q"](state, u, int(targets[0]), n)
    if k == 2:
        return _active["apply_2q"](state, u, int(targets[0]), int(targets[1]), n)
    # gates wider than 2 qubits are cold paths; numpy handles any k
    return _np_apply_kq(state, u, tuple(int(t) for t in targets), n)


def apply_matrix_columns(mat, u, targets, n):
    """Left-multiply every column of ``mat`` by the embedded matrix."""
    mat = _c128(mat)
    u = _c128(u)
    k = len(targets)
    if k == 1:
        return _active["apply_1q_cols"](mat, u, int(targets[0]), n)
    if k == 2:
        return _active["apply_2q_cols"](mat, u, int(targets[0]), int(targets[1]), n)
    return _np_apply_kq_cols(mat, u, tuple(int(t) for t in targets), n)


def apply_matrix_density(rho, e, targets, n):
    """E rho E^dagger for Hermitian rho (E need not be unitary)."""
    a = apply_matrix_columns(rho, e, targets, n)  # E rho
    # E (E rho)^dagger = E rho^dagger E^dagger = E rho E^dagger for Hermitian rho
    return apply_matrix_columns(a.conj().T, e, targets, n)


def apply_kraus_density(rho, operators, targets, n):
    """Sum of E rho E^dagger over the channel's Kraus operators."""
    out = np.zeros_like(np.ascontiguousarray(rho, dtype=np.complex128))
    for e in operators:
        out += apply_matrix_density(rho, e, targets, n)
    return out


def cdf_from_probs(probs):
    """Inclusive cumulative table with the final entry pinned to 1.0."""
    cdf = np.cumsum(np.asarray(probs, dtype=np.float64))
    cdf[-1] = 1.0
    return cdf


def sample_indices(cdf, uniforms):
    """Draw basis indices from a cumulative table via uniforms in [0, 1)."""
    return _active["sample_indices"](
        np.ascontiguousarray(cdf, dtype=np.float64),
        np.ascontiguousarray(uniforms, dtype=np.float64),
    )


def sample_action_bits(cdf, uniforms, n_bits):
    """Draw outcomes and unpack them to a (rounds, n_bits) 0/1 matrix."""
    return _active["sample_action_bits"](
        np.ascontiguousarray(cdf, dtype=np.float64),
        np.ascontiguousarray(uniforms, dtype=np.float64),
        n_bits,
    )


def score_rounds(actions, defense):
    """Team score per round: +1 per player off the defended target, -1 on it."""
    return _active["score_rounds"](
        np.ascontiguousarray(actions, dtype=np.uint8),
        np.ascontiguousarray(defense, dtype=np.uint8),
    )


def warm_up() -> None:
    """Trigger JIT compilation of the active backend on tiny inputs."""
    eye2 = np.eye(2, dtype=np.complex128)
    eye4 = np.eye(4, dtype=np.complex128)
    state = np.zeros(4, dtype=np.complex128)
    state[0] = 1.0
    apply_matrix_state(state, eye2, (0,), 2)
    apply_matrix_state(state, eye4, (0, 1), 2)
    rho = np.outer(state, state.conj())
    apply_matrix_density(rho, eye2, (1,), 2)
    apply_matrix_density(rho, eye4, (0, 1), 2)
    cdf = cdf_from_probs(np.full(4, 0.25))
    u = np.array([0.1, 0.9])
    sample_indices(cdf, u)
    sample_action_bits(cdf, u, 2)
    score_rounds(np.zeros((2, 2), dtype=np.uint8), np.zeros(2, dtype=np.uint8))
