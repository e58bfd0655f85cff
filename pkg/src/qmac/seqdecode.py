"""Sequential and successive decoding: POVMs, success bounds, diagnostics.

A sequential decoder tests codewords one at a time with yes/no projective
measurements; its POVM is a product of sandwiched projectors.  The packing
bound lower-bounds the code-averaged success probability from four measured
constants (epsilon, d, D, message count).  The successive variant decodes
one sender fully, then the other, over a multiple access channel.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from . import eacode, qmat, typicality
from .qmat import DensityOperator, DimensionCapError, KrausChannel, PovmSet, PureState

__all__ = [
    "PackingConstants",
    "PackingBound",
    "SuccessiveConstants",
    "SuccessiveBound",
    "SeqReport",
    "sequential_povm",
    "exact_success_probability",
    "expected_success_exhaustive",
    "packing_lower_bound",
    "packing_diagnostics",
    "ea_sequential_protocol",
    "successive_povm",
    "successive_bound",
    "unassisted_successive_exponents",
    "assisted_successive_exponents",
]

PROJECTOR_TOL = 1e-9
EXHAUSTIVE_CAP = 100_000
INDEX_SET_CAP = 4096


class PackingConstants:
    """Constants feeding the sequential packing bound."""

    __slots__ = ("epsilon", "d", "D", "message_count")

    def __init__(self, epsilon, d, D, message_count):
        epsilon, d, D = float(epsilon), float(d), float(D)
        if not 0.0 < epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
        if d <= 0 or D <= 0:
            raise ValueError("d and D must be positive")
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "message_count", int(message_count))

    def __setattr__(self, *a):
        raise AttributeError("PackingConstants is immutable")


class PackingBound:
    """Value of the packing bound plus whether its hypotheses held."""

    __slots__ = ("value", "condition_holds")

    def __init__(self, value: float, condition_holds: bool):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "condition_holds", bool(condition_holds))

    def __setattr__(self, *a):
        raise AttributeError("PackingBound is immutable")

    def __repr__(self):
        return f"PackingBound({self.value:.6g}, condition_holds={self.condition_holds})"


def _check_projector(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if float(np.max(np.abs(p @ p - p))) > PROJECTOR_TOL:
        raise ValueError(f"{name} is not idempotent within {PROJECTOR_TOL}")
    return p


def sequential_povm(code: Sequence, code_projector, word_projectors: Mapping
                    ) -> PovmSet:
    """POVM of the test-codewords-in-order decoder.

    Lambda_m = Qbar_{c_1} ... Qbar_{c_{m-1}} Pibar_{c_m} Qbar_{c_{m-1}} ...
    Qbar_{c_1}, with Qbar_x = Pi (I - Pi_x) Pi and Pibar_x = Pi Pi_x Pi.
    The elements are PSD and sum to at most the identity; the leftover
    completion element is the abort outcome.

    Parameters
    ----------
    code : sequence
        Codeword letters c_m in message order; letters index
        ``word_projectors``.
    code_projector : ndarray
        The code subspace projector Pi.
    word_projectors : mapping
        Letter -> codeword subspace projector Pi_x.
    """
    pi = _check_projector(code_projector, "code projector")
    dim = pi.shape[0]
    space = qmat.FactorSpace(("S",), (dim,))
    eye = np.eye(dim)
    pibar = {}
    qbar = {}
    for x in set(code):
        px = _check_projector(word_projectors[x], f"word projector {x!r}")
        pibar[x] = pi @ px @ pi
        qbar[x] = pi @ (eye - px) @ pi
    elements = {}
    left = eye
    for m, x in enumerate(code):
        elements[m] = left @ pibar[x] @ left.conj().T
        left = left @ qbar[x]
    return PovmSet(space, elements)


def exact_success_probability(states: Sequence, povm: PovmSet) -> float:
    """Average of Tr{Lambda_m rho_m} over messages; states align with POVM keys."""
    keys = list(povm.keys())
    if len(states) != len(keys):
        raise ValueError("one state per POVM element required")
    total = 0.0
    for key, rho in zip(keys, states):
        mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
        total += float(np.trace(povm[key] @ mat).real)
    return total / len(keys)


def expected_success_exhaustive(ensemble, code_projector, word_projectors,
                                message_count: int,
                                cap: int = EXHAUSTIVE_CAP) -> float:
    """Exact code-averaged success, summing over every possible codebook.

    ``ensemble`` is a sequence of (probability, density matrix) pairs; the
    codebook distribution draws each message letter independently with those
    probabilities.  Refuses to enumerate more than ``cap`` codebooks.
    """
    ensemble = list(ensemble)
    n_letters = len(ensemble)
    if n_letters**message_count > cap:
        raise ValueError(
            f"{n_letters}^{message_count} codebooks exceed the enumeration cap {cap}"
        )
    pi = _check_projector(code_projector, "code projector")
    dim = pi.shape[0]
    eye = np.eye(dim)
    pibar = []
    qbar = []
    mats = []
    for x in range(n_letters):
        px = _check_projector(word_projectors[x], f"word projector {x}")
        pibar.append(pi @ px @ pi)
        qbar.append(pi @ (eye - px) @ pi)
        mats.append(np.asarray(ensemble[x][1], dtype=complex))
    probs = [float(p) for p, _ in ensemble]

    total = 0.0

    # depth-first enumeration of codebooks, sharing left-product prefixes
    def rec(weight, left, depth, success):
        nonlocal total
        if depth == message_count:
            total += weight * success / message_count
            return
        for x in range(n_letters):
            lam = left @ pibar[x] @ left.conj().T
            s_x = float(np.trace(lam @ mats[x]).real)
            rec(weight * probs[x], left @ qbar[x], depth + 1, success + s_x)

    rec(1.0, eye, 0, 0.0)
    return total


def packing_lower_bound(c: PackingConstants) -> PackingBound:
    """|(1 - 2 eps)(2 - e^{d|M|/D})|^2, or 0 with a flag when it degenerates.

    The flag also drops when epsilon exceeds 1/2, where the guarantee is
    vacuous even though the absolute value would produce a positive number.
    """
    x = c.d * c.message_count / c.D
    bracket = 2.0 - math.exp(x)
    if bracket <= 0.0:
        return PackingBound(0.0, False)
    value = abs((1.0 - 2.0 * c.epsilon) * bracket) ** 2
    return PackingBound(value, c.epsilon <= 0.5)


def packing_diagnostics(ensemble, code_projector, word_projectors,
                        z_max: int) -> list[float]:
    """The trace sequence f_z = Tr{W_1 Pi Wbar_0^z} for z = 0..z_max.

    W_1 = sum p(x) Pi_x rho_x Pi_x and Wbar_0 = Pi (sum p(x) Pi_x) Pi; the
    power is a plain matrix product.  With measured constants these satisfy
    f_0 >= 1 - 2 eps and f_z <= (d/D)^z f_0.
    """
    ensemble = list(ensemble)
    pi = _check_projector(code_projector, "code projector")
    dim = pi.shape[0]
    w1 = np.zeros((dim, dim), dtype=complex)
    w0 = np.zeros((dim, dim), dtype=complex)
    for (p, rho), px in zip(ensemble, word_projectors):
        px = np.asarray(px, dtype=complex)
        w1 += p * (px @ np.asarray(rho) @ px)
        w0 += p * px
    w0bar = pi @ w0 @ pi
    out = []
    cur = pi.copy()
    for _ in range(z_max + 1):
        out.append(float(np.trace(w1 @ cur).real))
        cur = cur @ w0bar
    return out


class SeqReport:
    """Result of one sequential-decoding experiment."""

    __slots__ = ("success_mean", "success_stderr", "bound",
                 "bound_condition_holds", "epsilon", "d", "D",
                 "n", "message_count", "seed", "trials")

    def __init__(self, success_mean, success_stderr, bound,
                 bound_condition_holds, epsilon, d, D,
                 n, message_count, seed, trials):
        object.__setattr__(self, "success_mean", float(success_mean))
        object.__setattr__(self, "success_stderr", float(success_stderr))
        object.__setattr__(self, "bound", float(bound))
        object.__setattr__(self, "bound_condition_holds", bool(bound_condition_holds))
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "d", float(d))
        object.__setattr__(self, "D", float(D))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "message_count", int(message_count))
        object.__setattr__(self, "seed", int(seed))
        object.__setattr__(self, "trials", int(trials))

    def __setattr__(self, *a):
        raise AttributeError("SeqReport is immutable")

    def to_json(self) -> dict:
        return {
            "success_mean": self.success_mean,
            "success_stderr": self.success_stderr,
            "bound": self.bound,
            "bound_condition_holds": self.bound_condition_holds,
            "epsilon": self.epsilon,
            "d": self.d,
            "D": self.D,
            "n": self.n,
            "message_count": self.message_count,
            "seed": self.seed,
            "trials": self.trials,
        }


def ea_protocol_instance(channel: KrausChannel, phi: PureState, n: int,
                         delta: float):
    """Shared setup of the entanglement-assisted sequential experiment.

    Returns ``(decomp, code_proj, sigma_by_index, word_proj_by_index)``
    where the two dictionaries run over the full index set S.  The code
    subspace projector is the product of the one-sided typical projectors;
    each word projector is the joint typical projector conjugated by that
    index's receiver-side encoder.
    """
    decomp = eacode.type_decompose(phi, n)
    size = eacode.index_set_size(decomp)
    if size > INDEX_SET_CAP:
        raise DimensionCapError(
            f"index set has {size} elements, beyond the exhaustive cap "
            f"{INDEX_SET_CAP}"
        )
    rho_n = eacode.channel_output_state(channel, decomp)
    rho_1 = qmat.apply_channel(
        channel, phi.density(), acting_on=(decomp.sender_label,)
    )
    recv = decomp.receiver_label
    out_labels = channel.out_space.labels
    rho_1 = qmat.permute(rho_1, (recv,) + out_labels)
    rho_a = qmat.partial_trace(rho_1, (recv,))
    rho_b = qmat.partial_trace(rho_1, out_labels)
    pi_a = typicality.typical_projector(rho_a, n, delta)
    pi_b = typicality.typical_projector(rho_b, n, delta)
    pi_ab = typicality.typical_projector(rho_1, n, delta)
    full = rho_n.space
    code_proj = (
        qmat.embed(qmat.Operator(pi_a.space, pi_a.projector), full).matrix
        @ qmat.embed(qmat.Operator(pi_b.space, pi_b.projector), full).matrix
    )
    pi_ab_full = qmat.embed(
        qmat.Operator(pi_ab.space, pi_ab.projector), full
    ).matrix
    sigma = {}
    words = {}
    for s in eacode.enumerate_indices(decomp):
        u = qmat.embed(
            qmat.Operator(
                decomp.receiver_space, eacode.hw_transpose_unitary(s, decomp)
            ),
            full,
        ).matrix
        sigma[s] = DensityOperator(full, u @ rho_n.matrix @ u.conj().T)
        words[s] = u @ pi_ab_full @ u.conj().T
    return decomp, code_proj, sigma, words


def ea_sequential_protocol(channel: KrausChannel, phi: PureState, n: int,
                           message_count: int, delta: float, seed: int,
                           trials: int) -> SeqReport:
    """Run the entanglement-assisted sequential decoder end to end.

    Samples ``trials`` codebooks, builds the sequential POVM from the
    typical code/word projectors, evaluates the exact average success per
    book, and reports the empirical mean together with the packing bound at
    constants measured over the full index set.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    decomp, code_proj, sigma, words = ea_protocol_instance(
        channel, phi, n, delta
    )
    all_s = list(sigma.keys())
    uniform = [1.0 / len(all_s)] * len(all_s)
    measured = typicality.measure_packing_constants(
        uniform,
        [sigma[s].matrix for s in all_s],
        code_proj,
        [words[s] for s in all_s],
    )
    eps = min(max(measured.epsilon, 1e-15), 1.0)
    bound = packing_lower_bound(
        PackingConstants(eps, measured.d, measured.D, message_count)
    )
    successes = []
    for t in range(trials):
        book = eacode.sample_code(decomp, message_count, seed + t)
        povm = sequential_povm(
            list(book.entries), code_proj, words
        )
        successes.append(
            exact_success_probability([sigma[s] for s in book.entries], povm)
        )
    arr = np.array(successes)
    stderr = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SeqReport(
        success_mean=float(arr.mean()),
        success_stderr=stderr,
        bound=bound.value,
        bound_condition_holds=bound.condition_holds,
        epsilon=measured.epsilon,
        d=measured.d,
        D=measured.D,
        n=n,
        message_count=message_count,
        seed=seed,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# two-stage (sequential and successive) decoding
# ---------------------------------------------------------------------------

class SuccessiveConstants:
    """Constants of the two-stage packing bound.

    ``eps_prime`` must be consistent with the first-stage guarantee
    2 - e^{d1_minus L / D1} >= 1 - eps_prime.
    """

    __slots__ = ("epsilon", "eps_prime", "d1_minus", "d1_plus", "d2", "D1",
                 "L", "M")

    def __init__(self, epsilon, eps_prime, d1_minus, d1_plus, d2, D1, L, M):
        vals = dict(epsilon=float(epsilon), eps_prime=float(eps_prime),
                    d1_minus=float(d1_minus), d1_plus=float(d1_plus),
                    d2=float(d2), D1=float(D1))
        if vals["epsilon"] <= 0 or any(
            vals[k] <= 0 for k in ("d1_minus", "d1_plus", "d2", "D1")
        ):
            raise ValueError("successive constants must be positive")
        if vals["eps_prime"] < 0:
            raise ValueError("eps_prime must be nonnegative")
        required = math.exp(vals["d1_minus"] * int(L) / vals["D1"]) - 1.0
        if vals["eps_prime"] < required - 1e-12:
            raise ValueError(
                f"eps_prime {vals['eps_prime']} below the consistent minimum "
                f"{required}"
            )
        for k, v in vals.items():
            object.__setattr__(self, k, v)
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "M", int(M))

    def __setattr__(self, *a):
        raise AttributeError("SuccessiveConstants is immutable")

    @classmethod
    def from_measurements(cls, epsilon, d1_minus, d1_plus, d2, D1, L, M):
        """Pick the smallest consistent eps_prime."""
        eps_prime = max(0.0, math.exp(float(d1_minus) * int(L) / float(D1)) - 1.0)
        return cls(epsilon, eps_prime, d1_minus, d1_plus, d2, D1, L, M)


class SuccessiveBound:
    """Two-stage bound, raw and clamped to [0, 1]."""

    __slots__ = ("value", "raw", "condition_holds")

    def __init__(self, value, raw, condition_holds):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "raw", float(raw))
        object.__setattr__(self, "condition_holds", bool(condition_holds))

    def __setattr__(self, *a):
        raise AttributeError("SuccessiveBound is immutable")


def successive_bound(c: SuccessiveConstants) -> SuccessiveBound:
    """|(1-2eps)(2 - e^{d2 M / d1_plus})|^2 - 2 sqrt(2 (eps + eps')).

    The raw value may be negative at desk scale; the clamped value floors
    it at zero.
    """
    bracket = 2.0 - math.exp(c.d2 * c.M / c.d1_plus)
    positive = bracket > 0.0 and c.epsilon <= 0.5
    main = abs((1.0 - 2.0 * c.epsilon) * bracket) ** 2 if bracket > 0 else 0.0
    raw = main - 2.0 * math.sqrt(2.0 * (c.epsilon + c.eps_prime))
    return SuccessiveBound(max(raw, 0.0), raw, positive)


def successive_povm(code1: Sequence, code2: Sequence, code_projector,
                    word_projectors_x: Mapping,
                    word_projectors_xy: Mapping) -> PovmSet:
    """Two-stage POVM: decode Alice's codeword sequentially, then Bob's.

    Lambda_{l,m} = M†M with
    M = Pi_{x(l),y(m)} Qbarbar_{x(l),y(m-1)} ... Qbarbar_{x(l),y(1)}
        Pi_{x(l)} Qbar_{x(l-1)} ... Qbar_{x(1)},
    where Qbar uses the code projector sandwich and Qbarbar the Pi_{x(l)}
    sandwich.
    """
    pi = _check_projector(code_projector, "code projector")
    dim = pi.shape[0]
    eye = np.eye(dim)
    space = qmat.FactorSpace(("S",), (dim,))
    px = {
        x: _check_projector(word_projectors_x[x], f"first-stage projector {x!r}")
        for x in set(code1)
    }
    pxy = {}
    for x in set(code1):
        for y in set(code2):
            pxy[(x, y)] = _check_projector(
                word_projectors_xy[(x, y)], f"second-stage projector {(x, y)!r}"
            )
    elements = {}
    first = eye
    for l, x in enumerate(code1):
        second = px[x] @ first
        for m, y in enumerate(code2):
            elements[(l, m)] = (
                (pxy[(x, y)] @ second).conj().T @ (pxy[(x, y)] @ second)
            )
            second = (px[x] @ (eye - pxy[(x, y)]) @ px[x]) @ second
        first = (pi @ (eye - px[x]) @ pi) @ first
    return PovmSet(space, elements)


def unassisted_successive_exponents(n, delta, h_b, h_b_given_x, h_b_given_xy):
    """Base-2 exponents of the unassisted parameter choices.

    D1 = 2^{n(H(B) - delta)}, d1+ = 2^{n(H(B|X) - delta)},
    d1- = 2^{n(H(B|X) + delta)}, d2 = 2^{n(H(B|XY) + delta)}, so that
    D1/d1- = 2^{n(I(X;B) - 2 delta)} and d1+/d2 = 2^{n(I(Y;B|X) - 2 delta)}
    hold identically.  Works on floats or symbolic quantities alike.
    """
    return {
        "D1": n * (h_b - delta),
        "d1_plus": n * (h_b_given_x - delta),
        "d1_minus": n * (h_b_given_x + delta),
        "d2": n * (h_b_given_xy + delta),
    }


def assisted_successive_exponents(n, delta, h_a, h_b, h_c, h_ac, h_abc):
    """Base-2 exponents of the entanglement-assisted parameter choices.

    D1 = 2^{n(H(A)+H(B)+H(C) - delta)}, d1+ = 2^{n(H(B)+H(AC) - delta)},
    d1- = 2^{n(H(B)+H(AC) + delta)}, d2 = 2^{n(H(ABC) + delta)}, giving
    D1/d1- = 2^{n(I(A;C) - 2 delta)} and d1+/d2 = 2^{n(I(B;AC) - 2 delta)}.
    """
    return {
        "D1": n * (h_a + h_b + h_c - delta),
        "d1_plus": n * (h_b + h_ac - delta),
        "d1_minus": n * (h_b + h_ac + delta),
        "d2": n * (h_abc + delta),
    }
