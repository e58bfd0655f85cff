"""Types, type-class subspaces and entropy-typical projectors.

Weak (entropy) typicality on eigenvalue products: the n-fold power of a
state is diagonal in the product eigenbasis, and a product eigenvector is
retained when its sample entropy -(1/n) log2(lambda product) sits within
delta of the base entropy.  Type classes group the index sequences sharing
an eigenvalue product, so projectors are assembled block by block.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import qmat
from .qmat import DimensionCapError

__all__ = [
    "TypeClass",
    "TypicalProjector",
    "MeasuredConstants",
    "enumerate_types",
    "type_sequences",
    "type_class_projector",
    "typical_projector",
    "measure_packing_constants",
]


class TypeClass:
    """All length-n sequences with a fixed letter-occurrence histogram.

    Attributes
    ----------
    counts : tuple of int
        Occurrences of each alphabet letter; sums to n.
    dim : int
        Number of sequences in the class (the multinomial coefficient).
    representative : tuple of int
        Lexicographically least member sequence.
    """

    __slots__ = ("counts", "dim", "representative")

    def __init__(self, counts: Sequence[int]):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError("type counts must be nonnegative")
        n = sum(counts)
        dim = math.factorial(n)
        for c in counts:
            dim //= math.factorial(c)
        rep = tuple(
            letter for letter, c in enumerate(counts) for _ in range(c)
        )
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "representative", rep)

    def __setattr__(self, *a):
        raise AttributeError("TypeClass is immutable")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def __eq__(self, other):
        return isinstance(other, TypeClass) and self.counts == other.counts

    def __hash__(self):
        return hash(self.counts)

    def __repr__(self):
        return f"TypeClass{self.counts}"


def enumerate_types(n: int, alphabet_size: int) -> list[TypeClass]:
    """All compositions of n into alphabet_size parts, first letter descending.

    The classes partition the alphabet_size**n sequences, so their dims sum
    to that total.  Raises :class:`DimensionCapError` when the sequence
    count exceeds the configured cap.
    """
    if n < 0 or alphabet_size < 1:
        raise ValueError("need n >= 0 and alphabet_size >= 1")
    total = alphabet_size**n
    cap = qmat.dimension_cap()
    if total > cap:
        raise DimensionCapError(
            f"{alphabet_size}^{n} = {total} sequences exceed the cap {cap}"
        )
    out: list[TypeClass] = []

    def rec(remaining: int, parts: list[int]):
        if len(parts) == alphabet_size - 1:
            out.append(TypeClass(parts + [remaining]))
            return
        for c in range(remaining, -1, -1):
            rec(remaining - c, parts + [c])

    rec(n, [])
    return out


def type_sequences(t: TypeClass):
    """Yield the sequences of a type class in lexicographic order."""
    counts = list(t.counts)
    n = t.n
    seq: list[int] = []

    def rec():
        if len(seq) == n:
            yield tuple(seq)
            return
        for letter, c in enumerate(counts):
            if c > 0:
                counts[letter] -= 1
                seq.append(letter)
                yield from rec()
                seq.pop()
                counts[letter] += 1

    yield from rec()


def sequence_vector(seq: Sequence[int], local_basis: np.ndarray) -> np.ndarray:
    """Product vector  b_{z1} (x) ... (x) b_{zn}  from columns of local_basis."""
    vec = local_basis[:, seq[0]]
    for z in seq[1:]:
        vec = np.kron(vec, local_basis[:, z])
    return vec


def type_class_projector(t: TypeClass, local_basis: np.ndarray | None = None,
                         alphabet_size: int | None = None) -> np.ndarray:
    """Rank-d_t projector onto the span of a type class's product vectors.

    Parameters
    ----------
    t : TypeClass
    local_basis : array, optional
        Columns are the single-copy basis; defaults to the computational
        basis of the alphabet size.
    """
    if local_basis is None:
        d = alphabet_size if alphabet_size is not None else len(t.counts)
        local_basis = np.eye(d, dtype=complex)
    local_basis = np.asarray(local_basis, dtype=complex)
    if local_basis.shape[1] != len(t.counts):
        raise ValueError(
            f"basis has {local_basis.shape[1]} columns for a "
            f"{len(t.counts)}-letter type"
        )
    dim = local_basis.shape[0] ** t.n
    proj = np.zeros((dim, dim), dtype=complex)
    for seq in type_sequences(t):
        v = sequence_vector(seq, local_basis)
        proj += np.outer(v, v.conj())
    return proj


class TypicalProjector:
    """A delta-typical projector for the n-fold power of a state.

    Attributes
    ----------
    space : FactorSpace
        The n-fold space (copy-major labels ``X1, Y1, X2, Y2, ...``).
    projector : ndarray
        The projector matrix; commutes with the n-fold state.
    delta : float
    base_entropy : float
        Entropy of the single-copy state in bits.
    weight : float
        Tr{Pi rho^(x)n}, the retained probability mass.
    lambda_max, lambda_min : float
        Largest and smallest retained eigenvalue of rho^(x)n (NaN when the
        projector is zero).
    """

    __slots__ = ("space", "projector", "delta", "base_entropy",
                 "weight", "lambda_max", "lambda_min")

    def __init__(self, space, projector, delta, base_entropy,
                 weight, lambda_max, lambda_min):
        mat = np.array(projector, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "projector", mat)
        object.__setattr__(self, "delta", float(delta))
        object.__setattr__(self, "base_entropy", float(base_entropy))
        object.__setattr__(self, "weight", float(weight))
        object.__setattr__(self, "lambda_max", float(lambda_max))
        object.__setattr__(self, "lambda_min", float(lambda_min))

    def __setattr__(self, *a):
        raise AttributeError("TypicalProjector is immutable")

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projector).real))


def typical_projector(rho: qmat.DensityOperator, n: int, delta: float
                      ) -> TypicalProjector:
    """Entropy-typical projector of rho^(x)n.

    A product eigenvector with eigenvalue product lam is retained when
    ``|-(1/n) log2 lam - H(rho)| <= delta``; eigenvectors touching a zero
    eigenvalue are never retained.  By construction every retained
    eigenvalue obeys the equipartition sandwich
    2^{-n(H+delta)} <= lam <= 2^{-n(H-delta)}.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    vals, vecs = qmat.eig_hermitian(rho)
    vals = np.clip(vals.real, 0.0, None)
    entropy = float(-sum(v * math.log2(v) for v in vals if v > 0))
    space = qmat.power_space(rho.space, n)
    dim = space.dim
    proj = np.zeros((dim, dim), dtype=complex)
    weight = 0.0
    lam_max, lam_min = -np.inf, np.inf
    for t in enumerate_types(n, len(vals)):
        if any(c > 0 and vals[i] <= 0 for i, c in enumerate(t.counts)):
            continue
        log_lam = sum(c * math.log2(vals[i]) for i, c in enumerate(t.counts) if c)
        if abs(-log_lam / n - entropy) <= delta + 1e-12:
            proj += type_class_projector(t, vecs)
            lam = 2.0**log_lam
            weight += t.dim * lam
            lam_max = max(lam_max, lam)
            lam_min = min(lam_min, lam)
    if not np.isfinite(lam_max):
        lam_max = lam_min = float("nan")
    return TypicalProjector(space, proj, delta, entropy, weight, lam_max, lam_min)


class MeasuredConstants:
    """Packing-hypothesis constants measured on an explicit ensemble."""

    __slots__ = ("epsilon", "d", "D", "commutator_residual")

    def __init__(self, epsilon, d, D, commutator_residual):
        object.__setattr__(self, "epsilon", float(epsilon))
        object.__setattr__(self, "d", float(d))
        object.__setattr__(self, "D", float(D))
        object.__setattr__(self, "commutator_residual", float(commutator_residual))

    def __setattr__(self, *a):
        raise AttributeError("MeasuredConstants is immutable")

    def __repr__(self):
        return (
            f"MeasuredConstants(epsilon={self.epsilon:.6g}, d={self.d:.6g}, "
            f"D={self.D:.6g}, commutator_residual={self.commutator_residual:.3g})"
        )


def measure_packing_constants(probs, states, code_projector, word_projectors
                              ) -> MeasuredConstants:
    """Measure (epsilon, d, D) for an ensemble against given projectors.

    Parameters
    ----------
    probs : sequence of float
        Ensemble weights, summing to 1.
    states : sequence of ndarray
        Density matrices rho_x, aligned with ``probs``.
    code_projector : ndarray
        The code subspace projector Pi.
    word_projectors : sequence of ndarray
        Codeword subspace projectors Pi_x, aligned with ``probs``.

    Returns
    -------
    MeasuredConstants
        ``epsilon`` = 1 - min over x of min(Tr{Pi rho_x}, Tr{Pi_x rho_x});
        ``1/d`` = min over x of the least eigenvalue of Pi_x rho_x Pi_x on
        the support of Pi_x; ``1/D`` = the largest eigenvalue of
        Pi rho-bar Pi; ``commutator_residual`` is the max-norm of
        [Pi_x, rho_x], worst case over x.
    """
    probs = [float(p) for p in probs]
    states = [np.asarray(s, dtype=complex) for s in states]
    word_projectors = [np.asarray(w, dtype=complex) for w in word_projectors]
    if not states:
        raise ValueError("empty ensemble")
    if not (len(probs) == len(states) == len(word_projectors)):
        raise ValueError("probs, states and word projectors must align")
    pi = np.asarray(code_projector, dtype=complex)

    min_overlap = 1.0
    inv_d = np.inf
    residual = 0.0
    for rho, w in zip(states, word_projectors):
        min_overlap = min(
            min_overlap,
            float(np.trace(pi @ rho).real),
            float(np.trace(w @ rho).real),
        )
        residual = max(residual, float(np.max(np.abs(w @ rho - rho @ w))))
        wvals, wvecs = qmat.eig_hermitian(w)
        supp = wvecs[:, wvals > 0.5]
        if supp.shape[1]:
            compressed = supp.conj().T @ rho @ supp
            inv_d = min(inv_d, float(np.linalg.eigvalsh(compressed).min()))
    epsilon = 1.0 - min_overlap
    d = (1.0 / inv_d) if (np.isfinite(inv_d) and inv_d > 0) else np.inf

    rho_bar = sum(p * rho for p, rho in zip(probs, states))
    top = float(np.linalg.eigvalsh((pi @ rho_bar @ pi + (pi @ rho_bar @ pi).conj().T) / 2).max())
    D = (1.0 / top) if top > 0 else np.inf
    return MeasuredConstants(epsilon, d, D, residual)
