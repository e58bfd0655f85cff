"""Simultaneous decoding for two-sender channels, and its coherent upgrade.

One joint square-root measurement recovers both messages at once: each
detection operator sandwiches the joint typical projector between encoder
conjugates and marginal typical projectors, and normalization by the
inverse square root of the sum yields a POVM.  A modular-shift relabeling
of both codebooks converts the average error criterion into a maximal one,
and lifting each POVM element to sqrt(Lambda) (x) |outcome> gives an
isometry that decodes coherently.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from . import eacode, qmat, typicality
from .qmat import KrausChannel, Operator, PovmSet

__all__ = [
    "MacCodePair",
    "MacProjectors",
    "mac_typical_projectors",
    "build_upsilon",
    "sqrt_measurement",
    "simultaneous_povm",
    "average_error",
    "error_breakdown",
    "hayashi_nagaoka_check",
    "randomize_code",
    "max_error_via_randomization",
    "coherent_decoder",
    "coherent_fidelity",
    "CoherentDecoder",
    "ea_successive_povm",
    "run_mac_experiment",
    "MacReport",
]

SUPPORT_CUTOFF = 1e-12


class MacCodePair:
    """Independent random codebooks for the two senders."""

    __slots__ = ("book1", "book2")

    def __init__(self, book1: eacode.EaCodeBook, book2: eacode.EaCodeBook):
        object.__setattr__(self, "book1", book1)
        object.__setattr__(self, "book2", book2)

    def __setattr__(self, *a):
        raise AttributeError("MacCodePair is immutable")

    @property
    def L(self) -> int:
        return self.book1.message_count

    @property
    def M(self) -> int:
        return self.book2.message_count

    @property
    def seeds(self) -> tuple[int, int]:
        return (self.book1.seed, self.book2.seed)

    @classmethod
    def sample(cls, decomp1, decomp2, L, M, seed1, seed2):
        if seed1 == seed2:
            raise ValueError("sender codebooks need independent seeds")
        return cls(
            eacode.sample_code(decomp1, L, seed1),
            eacode.sample_code(decomp2, M, seed2),
        )


def randomize_code(pair: MacCodePair, s_shift: int, t_shift: int) -> MacCodePair:
    """Relabel both codebooks by modular message shifts (common randomness)."""
    b1, b2 = pair.book1, pair.book2
    if not (0 <= s_shift < b1.message_count and 0 <= t_shift < b2.message_count):
        raise ValueError("shifts must lie within the message ranges")
    e1 = tuple(b1.entries[(l + s_shift) % b1.message_count]
               for l in range(b1.message_count))
    e2 = tuple(b2.entries[(m + t_shift) % b2.message_count]
               for m in range(b2.message_count))
    return MacCodePair(
        eacode.EaCodeBook(b1.message_count, e1, b1.seed, b1.decomp),
        eacode.EaCodeBook(b2.message_count, e2, b2.seed, b2.decomp),
    )


class MacProjectors:
    """The typical-projector bundle of a two-sender channel output.

    ``marginals`` holds the seven embedded typical projectors keyed
    "A", "B", "C", "AB", "AC", "BC", "ABC"; ``pi1_hat``, ``pi2_hat``,
    ``pi3_hat`` are the three complementary products (A (x) BC, B (x) AC,
    C (x) AB) and ``pi_full`` aliases the joint projector.  Everything
    lives on the full (A..., B..., C...) space.
    """

    __slots__ = ("space", "marginals", "pi1_hat", "pi2_hat", "pi3_hat",
                 "pi_full", "delta")

    def __init__(self, space, marginals: dict, delta: float):
        frozen = {}
        for key, mat in marginals.items():
            m = np.asarray(mat, dtype=complex).copy()
            m.setflags(write=False)
            frozen[key] = m
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "marginals", frozen)
        object.__setattr__(self, "pi1_hat", frozen["A"] @ frozen["BC"])
        object.__setattr__(self, "pi2_hat", frozen["B"] @ frozen["AC"])
        object.__setattr__(self, "pi3_hat", frozen["C"] @ frozen["AB"])
        object.__setattr__(self, "pi_full", frozen["ABC"])
        object.__setattr__(self, "delta", float(delta))

    def __setattr__(self, *a):
        raise AttributeError("MacProjectors is immutable")


def mac_typical_projectors(channel: KrausChannel, decomp1, decomp2,
                           delta: float) -> MacProjectors:
    """Build the seven typical projectors of the channel output and bundle them."""
    n = decomp1.n
    rho_n = eacode.channel_output_state(channel, decomp1, decomp2)
    full = rho_n.space
    joint = qmat.tensor(decomp1.phi, decomp2.phi).density()
    rho_1 = qmat.apply_channel(channel, joint, acting_on=channel.in_space.labels)
    a, b = decomp1.receiver_label, decomp2.receiver_label
    c_labels = channel.out_space.labels
    rho_1 = qmat.permute(rho_1, (a, b) + c_labels)

    def proj(labels):
        marg = (
            rho_1 if set(labels) == set(rho_1.space.labels)
            else qmat.partial_trace(rho_1, labels)
        )
        tp = typicality.typical_projector(marg, n, delta)
        return qmat.embed(Operator(tp.space, tp.projector), full).matrix

    marginals = {
        "A": proj((a,)),
        "B": proj((b,)),
        "C": proj(c_labels),
        "AB": proj((a, b)),
        "AC": proj((a,) + c_labels),
        "BC": proj((b,) + c_labels),
        "ABC": proj((a, b) + c_labels),
    }
    return MacProjectors(full, marginals, delta)


def _receiver_unitary(decomp, s, full_space) -> np.ndarray:
    return qmat.embed(
        Operator(decomp.receiver_space, eacode.hw_transpose_unitary(s, decomp)),
        full_space,
    ).matrix


def build_upsilon(pair: MacCodePair, l: int, m: int,
                  projectors: MacProjectors) -> np.ndarray:
    """Detection operator for message pair (l, m).

    U^T_1 Pi3 Pi2 U^T_2 Pi_full U^*_2 Pi2 Pi3 U^*_1, with the encoders
    pulled to the receiver shares; positive semidefinite by construction.
    """
    full = projectors.space
    u1 = _receiver_unitary(pair.book1.decomp, pair.book1[l], full)
    u2 = _receiver_unitary(pair.book2.decomp, pair.book2[m], full)
    wing = (
        u2.conj().T @ projectors.pi2_hat @ projectors.pi3_hat @ u1.conj().T
    )
    core = wing.conj().T @ projectors.pi_full @ wing
    return (core + core.conj().T) / 2.0


def sqrt_measurement(upsilons: Mapping) -> PovmSet:
    """Square-root (pretty good) measurement of a PSD family.

    Lambda_k = S^{-1/2} Upsilon_k S^{-1/2} with S the family sum and the
    inverse square root taken on the support (cutoff 1e-12).  The elements
    sum to the support projector of S.
    """
    upsilons = dict(upsilons)
    if not upsilons:
        raise ValueError("need at least one detection operator")
    mats = {k: np.asarray(v, dtype=complex) for k, v in upsilons.items()}
    dim = next(iter(mats.values())).shape[0]
    total = sum(mats.values())
    inv_root = qmat.operator_power(total, -0.5, support_cutoff=SUPPORT_CUTOFF)
    supp = qmat.operator_power(total, 0.0, support_cutoff=SUPPORT_CUTOFF)
    elements = {}
    recomposed = np.zeros((dim, dim), dtype=complex)
    for k, v in mats.items():
        lam = inv_root @ v @ inv_root
        lam = (lam + lam.conj().T) / 2.0
        elements[k] = lam
        recomposed += lam
    defect = float(np.max(np.abs(recomposed - supp)))
    if defect > 1e-8:
        raise ValueError(
            f"square-root measurement misses the support projector by {defect:.3e}; "
            "some detection operator leaks outside the family support"
        )
    space = qmat.FactorSpace(("S",), (dim,))
    return PovmSet(space, elements)


def simultaneous_povm(pair: MacCodePair, projectors: MacProjectors) -> PovmSet:
    """Square-root measurement over all (l, m) detection operators."""
    ups = {
        (l, m): build_upsilon(pair, l, m, projectors)
        for l in range(pair.L)
        for m in range(pair.M)
    }
    return sqrt_measurement(ups)


def _codeword_states(channel, pair):
    rho = eacode.channel_output_state(channel, pair.book1.decomp, pair.book2.decomp)
    out = {}
    for l in range(pair.L):
        for m in range(pair.M):
            out[(l, m)] = eacode.conjugate_by_receiver_encoders(
                rho,
                [(pair.book1.decomp, pair.book1[l]),
                 (pair.book2.decomp, pair.book2[m])],
            )
    return out


def average_error(channel: KrausChannel, pair: MacCodePair, povm: PovmSet
                  ) -> float:
    """Mean over (l, m) of Tr{(I - Lambda_{l,m}) sigma_{l,m}}."""
    sigmas = _codeword_states(channel, pair)
    dim = povm.space.dim
    eye = np.eye(dim)
    total = 0.0
    for key, sigma in sigmas.items():
        total += float(np.trace((eye - povm[key]) @ sigma.matrix).real)
    return total / (pair.L * pair.M)


def error_breakdown(channel: KrausChannel, pair: MacCodePair, povm: PovmSet
                    ) -> dict:
    """Split the average error by which sender was misidentified.

    Returns a dict with ``wrong_alice`` (l' != l, m' = m), ``wrong_bob``,
    ``wrong_both``, ``abort`` (the implicit completion outcome) and
    ``total``.
    """
    sigmas = _codeword_states(channel, pair)
    abort = povm.completion()
    parts = {"wrong_alice": 0.0, "wrong_bob": 0.0, "wrong_both": 0.0, "abort": 0.0}
    norm = pair.L * pair.M
    for (l, m), sigma in sigmas.items():
        for (lp, mp) in povm.keys():
            if (lp, mp) == (l, m):
                continue
            w = float(np.trace(povm[(lp, mp)] @ sigma.matrix).real)
            if lp != l and mp == m:
                parts["wrong_alice"] += w / norm
            elif lp == l and mp != m:
                parts["wrong_bob"] += w / norm
            else:
                parts["wrong_both"] += w / norm
        parts["abort"] += float(np.trace(abort @ sigma.matrix).real) / norm
    parts["total"] = sum(parts.values())
    return parts


def max_error_via_randomization(channel: KrausChannel, pair: MacCodePair,
                                povm: PovmSet) -> float:
    """Max over message pairs of the shift-averaged error.

    For every (l, m), average the pairwise error over all modular shifts
    (S, T) of both codebooks; the result equals the plain average error for
    each pair, so the maximum does too.
    """
    sigmas = _codeword_states(channel, pair)
    dim = povm.space.dim
    eye = np.eye(dim)
    pairwise = {
        key: float(np.trace((eye - povm[key]) @ sigma.matrix).real)
        for key, sigma in sigmas.items()
    }
    worst = 0.0
    for l in range(pair.L):
        for m in range(pair.M):
            acc = 0.0
            for s in range(pair.L):
                for t in range(pair.M):
                    acc += pairwise[((l + s) % pair.L, (m + t) % pair.M)]
            worst = max(worst, acc / (pair.L * pair.M))
    return worst


def hayashi_nagaoka_check(S, T, tol: float = 1e-9):
    """Verify I - (S+T)^{-1/2} S (S+T)^{-1/2} <= 2(I-S) + 4T.

    Requires 0 <= S <= I and T >= 0 (within ``tol``); the inverse square
    root is the pseudo-inverse on the support of S + T.

    Returns
    -------
    (holds, min_gap_eigenvalue)
        ``holds`` is true when the least eigenvalue of RHS - LHS clears
        ``-tol``.
    """
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    s_vals = np.linalg.eigvalsh((S + S.conj().T) / 2)
    t_vals = np.linalg.eigvalsh((T + T.conj().T) / 2)
    if s_vals.min() < -tol or s_vals.max() > 1 + tol:
        raise ValueError("S must satisfy 0 <= S <= I")
    if t_vals.min() < -tol:
        raise ValueError("T must be positive semidefinite")
    eye = np.eye(S.shape[0])
    inv_root = qmat.operator_power(S + T, -0.5, support_cutoff=SUPPORT_CUTOFF)
    lhs = eye - inv_root @ S @ inv_root
    rhs = 2.0 * (eye - S) + 4.0 * T
    gap = np.linalg.eigvalsh(((rhs - lhs) + (rhs - lhs).conj().T) / 2)
    return bool(gap.min() >= -tol), float(gap.min())


# ---------------------------------------------------------------------------
# coherent decoding
# ---------------------------------------------------------------------------

class CoherentDecoder:
    """Isometry sum_k sqrt(Lambda_k) (x) |k> over POVM outcomes plus abort."""

    __slots__ = ("matrix", "outcomes", "povm")

    def __init__(self, matrix, outcomes, povm):
        mat = np.asarray(matrix, dtype=complex).copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "outcomes", tuple(outcomes))
        object.__setattr__(self, "povm", povm)

    def __setattr__(self, *a):
        raise AttributeError("CoherentDecoder is immutable")

    def isometry_defect(self) -> float:
        dim = self.matrix.shape[1]
        return float(np.max(np.abs(
            self.matrix.conj().T @ self.matrix - np.eye(dim)
        )))

    def block(self, outcome) -> np.ndarray:
        i = self.outcomes.index(outcome)
        d = self.matrix.shape[1]
        return self.matrix[i * d:(i + 1) * d, :]


def coherent_decoder(povm: PovmSet) -> CoherentDecoder:
    """Lift a POVM to an isometry by recording the outcome coherently.

    The completion element is appended under the key ``"abort"`` so the
    blocks' squares resolve the identity and V†V = I within 1e-9.
    """
    keys = list(povm.keys())
    dim = povm.space.dim
    blocks = []
    for k in keys:
        blocks.append(qmat.operator_power(povm[k], 0.5, support_cutoff=0.0))
    comp = povm.completion()
    blocks.append(qmat.operator_power(
        (comp + comp.conj().T) / 2, 0.5, support_cutoff=0.0
    ))
    outcomes = keys + ["abort"]
    v = np.vstack(blocks)
    dec = CoherentDecoder(v, outcomes, povm)
    defect = dec.isometry_defect()
    if defect > 1e-9:
        raise ValueError(f"coherent lift misses isometry by {defect:.3e}")
    return dec


def coherent_fidelity(channel: KrausChannel, pair: MacCodePair, povm: PovmSet,
                      input_amplitudes=None) -> float:
    """Overlap of the coherently decoded state with its ideal target.

    Averaged over the common-randomness shifts of both senders, the overlap
    is a convex combination over (l, m) of <psi_{l,m}| sqrt(Lambda_{l,m})
    |psi_{l,m}> on the purified channel output, so it is at least the
    average success probability of the underlying POVM.

    Parameters
    ----------
    input_amplitudes : (array, array), optional
        Amplitude matrices alpha[j, l] and beta[k, m] of the two senders'
        superposed messages; defaults to uniform.  Only the marginal message
        weights affect the result, which is the point of the shift
        averaging.
    """
    L, M = pair.L, pair.M
    if input_amplitudes is None:
        p1 = np.full(L, 1.0 / L)
        p2 = np.full(M, 1.0 / M)
    else:
        alpha, beta = input_amplitudes
        alpha = np.atleast_2d(np.asarray(alpha, dtype=complex))
        beta = np.atleast_2d(np.asarray(beta, dtype=complex))
        if alpha.shape[-1] != L or beta.shape[-1] != M:
            raise ValueError("amplitude matrices must have L and M columns")
        p1 = (np.abs(alpha) ** 2).sum(axis=0)
        p2 = (np.abs(beta) ** 2).sum(axis=0)
        p1 = p1 / p1.sum()
        p2 = p2 / p2.sum()

    d1, d2 = pair.book1.decomp, pair.book2.decomp
    n = d1.n
    psi = qmat.tensor(d1.phi_n, d2.phi_n)
    for i in range(1, n + 1):
        psi = qmat.apply_isometry_to_state(
            channel, psi,
            acting_on=(f"{d1.sender_label}{i}", f"{d2.sender_label}{i}"),
            out_labels=tuple(f"{l}{i}" for l in channel.out_space.labels),
            env_label=f"E{i}",
        )
    abc_labels = (
        d1.receiver_space.labels + d2.receiver_space.labels
        + tuple(f"{l}{i}" for i in range(1, n + 1)
                for l in channel.out_space.labels)
    )
    env_labels = tuple(f"E{i}" for i in range(1, n + 1))
    psi = qmat.permute(psi, abc_labels + env_labels)
    d_abc = psi.space.subspace(abc_labels).dim
    d_env = psi.space.dim // d_abc
    abc_space = psi.space.subspace(abc_labels)

    roots = {k: qmat.operator_power(povm[k], 0.5, support_cutoff=0.0)
             for k in povm.keys()}
    overlap = {}
    for l in range(L):
        for m in range(M):
            u1 = qmat.embed(
                Operator(d1.receiver_space,
                         eacode.hw_transpose_unitary(pair.book1[l], d1)),
                abc_space,
            ).matrix
            u2 = qmat.embed(
                Operator(d2.receiver_space,
                         eacode.hw_transpose_unitary(pair.book2[m], d2)),
                abc_space,
            ).matrix
            vec = psi.vector.reshape(d_abc, d_env)
            vec = (u1 @ u2) @ vec
            out = roots[(l, m)] @ vec
            overlap[(l, m)] = float(np.vdot(vec, out).real)

    fidelity = 0.0
    for l in range(L):
        for m in range(M):
            shift_avg = sum(
                overlap[((l + s) % L, (m + t) % M)]
                for s in range(L) for t in range(M)
            ) / (L * M)
            fidelity += p1[l] * p2[m] * shift_avg
    return fidelity


def ea_successive_povm(pair: MacCodePair, projectors: MacProjectors) -> PovmSet:
    """Two-stage decoder instantiated with the typical-projector families.

    Code subspace: the product of the three single-system projectors.
    First stage tests Alice's codewords with the AC-pair projector rotated
    by her encoder (times the B projector); the second stage tests Bob's
    with the rotated joint projector.
    """
    from . import seqdecode

    full = projectors.space
    b1, b2 = pair.book1, pair.book2
    code_proj = (
        projectors.marginals["A"] @ projectors.marginals["B"]
        @ projectors.marginals["C"]
    )
    words_x = {}
    for s1 in set(b1.entries):
        u1 = _receiver_unitary(b1.decomp, s1, full)
        words_x[s1] = (
            u1 @ projectors.marginals["AC"] @ u1.conj().T
            @ projectors.marginals["B"]
        )
    words_xy = {}
    for s1 in set(b1.entries):
        u1 = _receiver_unitary(b1.decomp, s1, full)
        for s2 in set(b2.entries):
            u2 = _receiver_unitary(b2.decomp, s2, full)
            rot = u1 @ u2
            words_xy[(s1, s2)] = rot @ projectors.pi_full @ rot.conj().T
    return seqdecode.successive_povm(
        list(b1.entries), list(b2.entries), code_proj, words_x, words_xy
    )


def run_mac_experiment(channel: KrausChannel, pair: MacCodePair, mode: str,
                       delta: float):
    """Build the requested decoder and report its exact error figures.

    ``epsilon_measured`` is the worst pairwise miss 1 - min Tr{Lambda sigma}
    over message pairs, so both the average success and the coherent
    fidelity clear 1 - epsilon_measured.
    """
    projectors = mac_typical_projectors(
        channel, pair.book1.decomp, pair.book2.decomp, delta
    )
    if mode == "simultaneous":
        povm = simultaneous_povm(pair, projectors)
    elif mode == "successive":
        povm = ea_successive_povm(pair, projectors)
    else:
        raise ValueError(f"unknown decoder mode {mode!r}")
    sigmas = _codeword_states(channel, pair)
    pairwise = {
        key: float(np.trace(povm[key] @ sigma.matrix).real)
        for key, sigma in sigmas.items()
    }
    avg_err = 1.0 - sum(pairwise.values()) / (pair.L * pair.M)
    report = MacReport(
        n=pair.book1.decomp.n,
        L=pair.L,
        M=pair.M,
        avg_error=avg_err,
        max_error_randomized=max_error_via_randomization(channel, pair, povm),
        epsilon_measured=1.0 - min(pairwise.values()),
        seeds=pair.seeds,
        mode=mode,
        breakdown=error_breakdown(channel, pair, povm),
    )
    return report, povm


class MacReport:
    """Result of one multiple-access decoding experiment."""

    __slots__ = ("n", "L", "M", "avg_error", "max_error_randomized",
                 "epsilon_measured", "seeds", "mode", "breakdown")

    def __init__(self, n, L, M, avg_error, max_error_randomized,
                 epsilon_measured, seeds, mode, breakdown):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "M", int(M))
        object.__setattr__(self, "avg_error", float(avg_error))
        object.__setattr__(self, "max_error_randomized", float(max_error_randomized))
        object.__setattr__(self, "epsilon_measured", float(epsilon_measured))
        object.__setattr__(self, "seeds", tuple(int(s) for s in seeds))
        object.__setattr__(self, "mode", str(mode))
        object.__setattr__(self, "breakdown", dict(breakdown))

    def __setattr__(self, *a):
        raise AttributeError("MacReport is immutable")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "L": self.L,
            "M": self.M,
            "mode": self.mode,
            "avg_error": self.avg_error,
            "max_error_randomized": self.max_error_randomized,
            "epsilon_measured": self.epsilon_measured,
            "seeds": list(self.seeds),
            "error_terms": self.breakdown,
        }
