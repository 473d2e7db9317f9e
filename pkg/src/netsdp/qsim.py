"""Target distributions for the tripartite line.

Reference families, Born-rule entanglement swapping with lossy detectors,
and random bilocal / biquantum models used as soundness oracles.

Systems are ordered (A, B1, B2, C) with big-endian basis indexing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netsdp.distribution import DistributionTable

Z = np.array([[1.0, 0.0], [0.0, -1.0]])
X = np.array([[0.0, 1.0], [1.0, 0.0]])
I2 = np.eye(2)


def p22_family(v: float) -> DistributionTable:
    """``P_v = v P22 + (1 - v) P0`` on binary inputs and outputs."""
    if not 0.0 <= v <= 1.0:
        raise ValueError("visibility must lie in [0, 1]")
    p = np.empty((2,) * 6)
    for x, y, z, a, b, c in np.ndindex(*p.shape):
        sign = (-1) ** (a + b + c + x * y + y * z)
        p[x, y, z, a, b, c] = v * (1 + sign) / 8 + (1 - v) / 8
    return DistributionTable((2, 2, 2), (2, 2, 2), p)


@dataclass(frozen=True)
class SwapConfig:
    theta_ab: float = np.pi / 4
    theta_bc: float = np.pi / 4
    alpha0: float = np.pi / 4
    alpha1: float = np.pi / 4
    eta_a: float = 1.0
    eta_c: float = 1.0

    def __post_init__(self):
        for name in ("theta_ab", "theta_bc"):
            th = getattr(self, name)
            if not -1e-12 <= th <= np.pi / 4 + 1e-12:
                raise ValueError(f"{name}={th} outside [0, pi/4]")
        for name in ("eta_a", "eta_c"):
            eta = getattr(self, name)
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"{name}={eta} outside [0, 1]")


def entangled_pair(theta: float) -> np.ndarray:
    """``cos(theta)|00> + sin(theta)|11>``."""
    return np.array([np.cos(theta), 0.0, 0.0, np.sin(theta)])


def dichotomic(alpha: float, x_sign: int) -> np.ndarray:
    return np.cos(alpha) * Z + x_sign * np.sin(alpha) * X


def lossy_povm(alpha: float, x_sign: int, eta: float) -> list:
    """``[eta P+, eta P-, (1 - eta) 1]`` for the observable ``cos(a) Z + s sin(a) X``."""
    obs = dichotomic(alpha, x_sign)
    plus = (I2 + obs) / 2
    minus = (I2 - obs) / 2
    return [eta * plus, eta * minus, (1 - eta) * I2]


def bsm() -> list:
    """Bell-state projectors in the order phi+, phi-, psi+, psi-."""
    s = 1 / np.sqrt(2)
    vecs = [
        np.array([s, 0, 0, s]),
        np.array([s, 0, 0, -s]),
        np.array([0, s, s, 0]),
        np.array([0, s, -s, 0]),
    ]
    return [np.outer(v, v) for v in vecs]


def born_table(state: np.ndarray, povms: list) -> np.ndarray:
    """``p[x_1.., o_1..] = <psi| E^1_{o_1|x_1} (x) ... |psi>`` for a pure state.

    ``povms[k][x]`` is the list of POVM elements of party k for input x; all
    inputs of a party must have the same outcome count.
    """
    dims = [povms[k][0][0].shape[0] for k in range(len(povms))]
    psi = np.asarray(state).reshape(dims)
    n = len(povms)
    inputs = [len(pk) for pk in povms]
    outputs = [len(pk[0]) for pk in povms]
    table = np.empty(inputs + outputs)
    for ctx in np.ndindex(*inputs):
        # stack each party's elements into one (outcomes, d, d) tensor
        ops = [np.stack(povms[k][ctx[k]]) for k in range(n)]
        # rho-contraction one party at a time
        res = np.einsum(psi.conj(), list(range(n)), psi, list(range(n, 2 * n)), list(range(2 * n)))
        for k in range(n):
            # contract bra index k and ket index n+k with ops[k][o, i, j] (bra i, ket j)
            res = np.tensordot(res, ops[k], axes=([0, n - k], [1, 2]))
        table[ctx] = res.real
    return table


def swap_distribution(cfg: SwapConfig) -> DistributionTable:
    """Entanglement-swapping statistics with lossy A and C detectors."""
    state = np.kron(entangled_pair(cfg.theta_ab), entangled_pair(cfg.theta_bc))
    alphas = (cfg.alpha0, cfg.alpha1)
    # A_0 = cos a0 Z - sin a0 X, A_1 = cos a1 Z + sin a1 X; C mirrored
    a_povms = [lossy_povm(alphas[x], -(-1) ** x, cfg.eta_a) for x in range(2)]
    c_povms = [lossy_povm(alphas[z], (-1) ** z, cfg.eta_c) for z in range(2)]
    b = bsm()
    # B acts on (B1, B2) jointly; treat the 16-dim space as (A, B, C) = (2, 4, 2)
    p = born_table(state, [a_povms, [b], c_povms])
    return DistributionTable((2, 1, 2), (3, 4, 3), p)


# -- random models ---------------------------------------------------------------

def _random_response(rng, n_in, n_out, deterministic):
    if deterministic:
        r = np.zeros((n_in, n_out))
        r[np.arange(n_in), rng.integers(n_out, size=n_in)] = 1.0
        return r
    return rng.dirichlet(np.ones(n_out), size=n_in)


def random_bilocal(seed, inputs=(2, 2, 2), outputs=(2, 2, 2), k1=None, k2=None,
                   deterministic=None) -> DistributionTable:
    """Finite-mixture bilocal model with independent hidden variables l1, l2.

    ``p(abc|xyz) = sum q1(l1) q2(l2) pA(a|x,l1) pB(b|y,l1,l2) pC(c|z,l2)``.
    """
    rng = np.random.default_rng(seed)
    k1 = int(rng.integers(1, 5)) if k1 is None else k1
    k2 = int(rng.integers(1, 5)) if k2 is None else k2
    if deterministic is None:
        deterministic = bool(rng.integers(2))
    q1 = rng.dirichlet(np.ones(k1))
    q2 = rng.dirichlet(np.ones(k2))
    ia, ib, ic = inputs
    oa, ob, oc = outputs
    pa = np.stack([_random_response(rng, ia, oa, deterministic) for _ in range(k1)])
    pb = np.stack([[_random_response(rng, ib, ob, deterministic) for _ in range(k2)]
                   for _ in range(k1)])
    pc = np.stack([_random_response(rng, ic, oc, deterministic) for _ in range(k2)])
    # indices: l=lambda1, m=lambda2
    p = np.einsum("l,m,lxa,lmyb,mzc->xyzabc", q1, q2, pa, pb, pc)
    return DistributionTable(tuple(inputs), tuple(outputs), p)


def _haar_unitary(rng, d):
    g = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_projective(rng, d, n_out):
    """Projective measurement with ``n_out`` outcomes on C^d (ranks as equal as possible)."""
    u = _haar_unitary(rng, d)
    groups = np.array_split(np.arange(d), n_out)
    return [u[:, g] @ u[:, g].conj().T for g in groups]


def random_biquantum(seed, measurement_outcomes=(2, 2, 2), inputs=(2, 2, 2),
                     product_states=False) -> DistributionTable:
    """Two random two-qubit pure states measured with random projective measurements.

    B measures jointly on its two qubits (four-dimensional), A and C on one qubit.
    """
    rng = np.random.default_rng(seed)

    def pure(d):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        return v / np.linalg.norm(v)

    if product_states:
        s1 = np.kron(pure(2), pure(2))
        s2 = np.kron(pure(2), pure(2))
    else:
        s1, s2 = pure(4), pure(4)
    state = np.kron(s1, s2)
    oa, ob, oc = measurement_outcomes
    ia, ib, ic = inputs
    a = [_random_projective(rng, 2, oa) for _ in range(ia)]
    b = [_random_projective(rng, 4, ob) for _ in range(ib)]
    c = [_random_projective(rng, 2, oc) for _ in range(ic)]
    p = born_table(state, [a, b, c])
    return DistributionTable(tuple(inputs), tuple(measurement_outcomes), p)
