"""Entanglement-assisted codebooks from shared pure states.

The n-fold power of a bipartite pure state splits into a direct sum of
maximally entangled blocks, one per type class of the Schmidt distribution.
Heisenberg-Weyl shift/phase operators acting block by block on the sender's
share commute through the shared entanglement by the transpose trick, so an
encoder applied before the channel is equivalent to its transpose applied
at the receiver.  Random codes draw one full index vector per message.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import qmat, typicality
from .qmat import DensityOperator, FactorSpace, KrausChannel, PureState

__all__ = [
    "TypeDecomposition",
    "HwIndex",
    "EaCodeBook",
    "schmidt",
    "type_decompose",
    "hw_unitary",
    "hw_transpose_unitary",
    "transpose_trick_residual",
    "enumerate_indices",
    "index_set_size",
    "sample_code",
    "encode",
    "channel_output_state",
]

REASSEMBLY_TOL = 1e-10


def schmidt(phi: PureState, cut):
    """Schmidt decomposition of a pure state across a bipartite cut.

    Parameters
    ----------
    phi : PureState
    cut : sequence of labels
        The factors forming the left side; the remaining labels form the
        right side (both sides must be nonempty).

    Returns
    -------
    (coefficients, left_basis, right_basis)
        Nonnegative coefficients in descending order with sum of squares 1,
        and orthonormal columns such that
        ``phi = sum_i c_i left[:, i] (x) right[:, i]``.  Degenerate
        coefficients keep the SVD's deterministic output order.
    """
    cut = tuple(cut)
    rest = tuple(l for l in phi.space.labels if l not in set(cut))
    if not cut or not rest:
        raise ValueError("cut must split the state into two nonempty sides")
    for l in cut:
        phi.space.axis(l)
    moved = qmat.permute(phi, cut + rest)
    d_left = phi.space.subspace(cut).dim
    d_right = phi.space.subspace(rest).dim
    m = moved.vector.reshape(d_left, d_right)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return s, u, vh.T


class TypeDecomposition:
    """Direct-sum structure of the n-fold power of a bipartite pure state.

    Attributes
    ----------
    phi : PureState
        Single-copy state on (sender, receiver) labels.
    n : int
    schmidt_probs : ndarray
        Squared Schmidt coefficients, descending.
    types : tuple of TypeClass
        Type classes of length-n sequences over the Schmidt alphabet.
    probs : ndarray
        Block weights p(t) = p(representative) * d_t; sums to 1.
    sender_space, receiver_space : FactorSpace
        n-fold one-sided spaces (labels like Ap1..Apn / A1..An).
    full_space : FactorSpace
        Side-major n-fold space: sender labels then receiver labels.
    phi_n : PureState
        The n-fold state on ``full_space``.
    """

    def __init__(self, phi: PureState, n: int):
        if len(phi.space.labels) != 2:
            raise ValueError("type decomposition needs a two-factor pure state")
        sender, receiver = phi.space.labels
        coeffs, left, right = schmidt(phi, (sender,))
        d = len(coeffs)
        self.phi = phi
        self.n = int(n)
        self.sender_label = sender
        self.receiver_label = receiver
        self.schmidt_probs = coeffs**2
        self.sender_basis = left
        self.receiver_basis = right
        self.types = tuple(typicality.enumerate_types(n, d))
        self.probs = np.array(
            [
                t.dim * math.prod(
                    self.schmidt_probs[i] ** c for i, c in enumerate(t.counts)
                )
                for t in self.types
            ]
        )
        self.sender_space = FactorSpace(
            tuple(f"{sender}{i}" for i in range(1, n + 1)),
            (phi.space.dim_of(sender),) * n,
        )
        self.receiver_space = FactorSpace(
            tuple(f"{receiver}{i}" for i in range(1, n + 1)),
            (phi.space.dim_of(receiver),) * n,
        )
        self.full_space = FactorSpace(
            self.sender_space.labels + self.receiver_space.labels,
            self.sender_space.dims + self.receiver_space.dims,
        )
        vec = phi.vector
        for _ in range(n - 1):
            vec = np.kron(vec, phi.vector)
        copy_major = qmat.power_space(phi.space, n)
        self.phi_n = qmat.permute(
            PureState(copy_major, vec), self.full_space.labels
        )
        # per-block sequence bases, built once; columns ordered (type, lex seq)
        sender_cols = []
        receiver_cols = []
        self.block_slices = []
        start = 0
        for t in self.types:
            for seq in typicality.type_sequences(t):
                sender_cols.append(typicality.sequence_vector(seq, left))
                receiver_cols.append(typicality.sequence_vector(seq, right))
            self.block_slices.append(slice(start, start + t.dim))
            start += t.dim
        self._sender_block_basis = np.stack(sender_cols, axis=1)
        self._receiver_block_basis = np.stack(receiver_cols, axis=1)
        assembled = sum(
            math.sqrt(p) * self.block_vector(i) for i, p in enumerate(self.probs)
        )
        defect = float(np.linalg.norm(assembled - self.phi_n.vector))
        if defect > REASSEMBLY_TOL:
            raise AssertionError(
                f"type-block reassembly misses the n-fold state by {defect:.3e}"
            )

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(t.dim for t in self.types)

    def block_vector(self, t_index: int) -> np.ndarray:
        """Unit vector of the maximally entangled block t on ``full_space``."""
        t = self.types[t_index]
        sl = self.block_slices[t_index]
        cols_s = self._sender_block_basis[:, sl]
        cols_r = self._receiver_block_basis[:, sl]
        vec = np.zeros(self.full_space.dim, dtype=complex)
        for j in range(t.dim):
            vec += np.kron(cols_s[:, j], cols_r[:, j])
        return vec / math.sqrt(t.dim)

    def block_state(self, t_index: int) -> PureState:
        return PureState(self.full_space, self.block_vector(t_index))

    @property
    def blocks(self) -> tuple[PureState, ...]:
        """All maximally entangled block states, in type order."""
        return tuple(self.block_state(i) for i in range(len(self.types)))


def type_decompose(phi: PureState, n: int) -> TypeDecomposition:
    """Decompose |phi>^(x)n into maximally entangled type blocks."""
    return TypeDecomposition(phi, n)


class HwIndex:
    """Per-type Heisenberg-Weyl indices (x_t, z_t, b_t).

    ``x_t`` and ``z_t`` are shift and phase exponents modulo the block
    dimension; ``b_t`` in {0, 1} flips the block's global sign.
    """

    __slots__ = ("triples", "block_dims")

    def __init__(self, triples, block_dims):
        triples = tuple(
            (int(x), int(z), int(b)) for x, z, b in triples
        )
        block_dims = tuple(int(d) for d in block_dims)
        if len(triples) != len(block_dims):
            raise ValueError("one (x, z, b) triple per type block required")
        for (x, z, b), d in zip(triples, block_dims):
            if not (0 <= x < d and 0 <= z < d and b in (0, 1)):
                raise ValueError(
                    f"index ({x}, {z}, {b}) out of range for block dimension {d}"
                )
        object.__setattr__(self, "triples", triples)
        object.__setattr__(self, "block_dims", block_dims)

    def __setattr__(self, *a):
        raise AttributeError("HwIndex is immutable")

    def __eq__(self, other):
        return isinstance(other, HwIndex) and self.triples == other.triples

    def __hash__(self):
        return hash(self.triples)

    def __repr__(self):
        return f"HwIndex{self.triples}"


def _block_matrix(s: HwIndex, decomp: TypeDecomposition) -> np.ndarray:
    """Block-diagonal (-1)^b X(x) Z(z) in the (type, lex-sequence) basis."""
    dim = decomp.sender_space.dim
    out = np.zeros((dim, dim), dtype=complex)
    for (x, z, b), t, sl in zip(s.triples, decomp.types, decomp.block_slices):
        d = t.dim
        block = np.zeros((d, d), dtype=complex)
        for j in range(d):
            block[(j + x) % d, j] = np.exp(2j * np.pi * j * z / d)
        out[sl, sl] = (-1.0) ** b * block
    return out


def hw_unitary(s: HwIndex, decomp: TypeDecomposition) -> np.ndarray:
    """The encoder U(s) on the sender's n-fold share, block-diagonal by type."""
    if s.block_dims != decomp.block_dims:
        raise ValueError("index block dimensions do not match the decomposition")
    b = decomp._sender_block_basis
    return b @ _block_matrix(s, decomp) @ b.conj().T


def hw_transpose_unitary(s: HwIndex, decomp: TypeDecomposition) -> np.ndarray:
    """U^T(s) on the receiver's n-fold share (transpose in the paired bases)."""
    if s.block_dims != decomp.block_dims:
        raise ValueError("index block dimensions do not match the decomposition")
    b = decomp._receiver_block_basis
    return b @ _block_matrix(s, decomp).T @ b.conj().T


def transpose_trick_residual(s: HwIndex, decomp: TypeDecomposition) -> float:
    """Norm of (U(s) on sender - U^T(s) on receiver) applied to the n-fold state.

    Zero for every index vector: the encoder ricochets off the type-block
    entanglement onto the receiver side.
    """
    u_s = qmat.Operator(decomp.sender_space, hw_unitary(s, decomp))
    u_r = qmat.Operator(decomp.receiver_space, hw_transpose_unitary(s, decomp))
    full = decomp.full_space
    lhs = qmat.embed(u_s, full).matrix @ decomp.phi_n.vector
    rhs = qmat.embed(u_r, full).matrix @ decomp.phi_n.vector
    return float(np.linalg.norm(lhs - rhs))


def index_set_size(decomp: TypeDecomposition) -> int:
    """|S| = prod over blocks of 2 d_t^2."""
    return math.prod(2 * d * d for d in decomp.block_dims)


def enumerate_indices(decomp: TypeDecomposition):
    """Yield every HwIndex in S, lexicographic in (x, z, b) per block."""
    ranges = [
        itertools.product(range(d), range(d), range(2))
        for d in decomp.block_dims
    ]
    for combo in itertools.product(*ranges):
        yield HwIndex(combo, decomp.block_dims)


class EaCodeBook:
    """A random code: one Heisenberg-Weyl index vector per message."""

    __slots__ = ("message_count", "entries", "seed", "decomp")

    def __init__(self, message_count, entries, seed, decomp):
        entries = tuple(entries)
        if len(entries) != message_count:
            raise ValueError("entry count must equal message_count")
        object.__setattr__(self, "message_count", int(message_count))
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "seed", int(seed))
        object.__setattr__(self, "decomp", decomp)

    def __setattr__(self, *a):
        raise AttributeError("EaCodeBook is immutable")

    def __getitem__(self, m: int) -> HwIndex:
        return self.entries[m]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "message_count": self.message_count,
            "entries": [
                {str(t): list(triple) for t, triple in enumerate(s.triples)}
                for s in self.entries
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, decomp: TypeDecomposition) -> "EaCodeBook":
        entries = []
        dims = decomp.block_dims
        for rec in obj["entries"]:
            triples = [tuple(rec[str(t)]) for t in range(len(dims))]
            entries.append(HwIndex(triples, dims))
        return cls(obj["message_count"], entries, obj["seed"], decomp)


def sample_code(decomp: TypeDecomposition, message_count: int, seed: int
                ) -> EaCodeBook:
    """Draw a codebook uniformly from the full index set S.

    Per-message draws come from a counter-based generator keyed by the seed
    with the counter offset by the message index, so books are reproducible
    and messages can be sampled independently (or in parallel) in any
    order.
    """
    entries = []
    for m in range(message_count):
        rng = np.random.Generator(np.random.Philox(key=seed, counter=m << 128))
        triples = []
        for d in decomp.block_dims:
            x = int(rng.integers(d))
            z = int(rng.integers(d))
            b = int(rng.integers(2))
            triples.append((x, z, b))
        entries.append(HwIndex(triples, decomp.block_dims))
    return EaCodeBook(message_count, entries, seed, decomp)


def channel_output_state(channel: KrausChannel, decomp: TypeDecomposition,
                         decomp2: TypeDecomposition | None = None
                         ) -> DensityOperator:
    """Channel output with receiver shares kept, before any encoding.

    Single sender: rho on (A..., B...) from |phi>^(x)n through n channel
    uses.  Two senders: rho on (A..., B..., C...) from phi^(x)n (x)
    psi^(x)n, the channel consuming the two sender shares copy by copy.
    """
    n = decomp.n
    out_all = [
        f"{l}{i}" for i in range(1, n + 1) for l in channel.out_space.labels
    ]
    if decomp2 is None:
        state = decomp.phi_n.density()
        for i in range(1, n + 1):
            state = qmat.apply_channel(
                channel, state,
                acting_on=(f"{decomp.sender_label}{i}",),
                out_labels=tuple(
                    f"{l}{i}" for l in channel.out_space.labels
                ),
            )
        return qmat.permute(
            state, list(decomp.receiver_space.labels) + out_all
        )
    if decomp2.n != n:
        raise ValueError("both senders must share the same block length")
    state = qmat.tensor(decomp.phi_n, decomp2.phi_n).density()
    for i in range(1, n + 1):
        state = qmat.apply_channel(
            channel, state,
            acting_on=(
                f"{decomp.sender_label}{i}",
                f"{decomp2.sender_label}{i}",
            ),
            out_labels=tuple(f"{l}{i}" for l in channel.out_space.labels),
        )
    return qmat.permute(
        state,
        list(decomp.receiver_space.labels)
        + list(decomp2.receiver_space.labels)
        + out_all,
    )


def conjugate_by_receiver_encoders(state, indexed_encoders) -> DensityOperator:
    """sigma = (prod U^T) rho (prod U^*) for encoders given as (decomp, index) pairs."""
    mat = state.matrix
    for decomp, s in indexed_encoders:
        u = qmat.embed(
            qmat.Operator(decomp.receiver_space, hw_transpose_unitary(s, decomp)),
            state.space,
        ).matrix
        mat = u @ mat @ u.conj().T
    return DensityOperator(state.space, mat)


def encode(book, m, channel: KrausChannel, phi_n=None, psi_n=None
           ) -> DensityOperator:
    """Receiver-side codeword state for message ``m``.

    Single sender: ``book`` is an :class:`EaCodeBook` and ``m`` a message
    index; the result is U^T(s_m) rho U^*(s_m) with the encoder pulled to
    the receiver share.  Two senders: ``book`` is a pair object with
    ``book1``/``book2`` attributes and ``m = (l, m2)``.

    ``phi_n``/``psi_n`` optionally override the shared states' channel
    output (must match the books' decompositions); by default the output is
    rebuilt from the books.
    """
    if hasattr(book, "book1") and hasattr(book, "book2"):
        l, m2 = m
        b1, b2 = book.book1, book.book2
        rho = channel_output_state(channel, b1.decomp, b2.decomp)
        return conjugate_by_receiver_encoders(
            rho, [(b1.decomp, b1[l]), (b2.decomp, b2[m2])]
        )
    rho = channel_output_state(channel, book.decomp)
    return conjugate_by_receiver_encoders(rho, [(book.decomp, book[m])])
