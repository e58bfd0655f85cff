"""Dense complex operator algebra over labeled tensor factors.

Every finite-dimensional object in this package is a dense numpy array
tagged with a :class:`FactorSpace` that names its tensor factors, so that
partial traces, embeddings and channel applications can be requested by
label instead of by axis bookkeeping.  All values are immutable and all
operations are pure functions; the global dimension cap (default 4096,
overridable through the ``QMAC_DIM_CAP`` environment variable) rejects
instances too large for exact simulation.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DimensionCapError",
    "FactorSpace",
    "Operator",
    "DensityOperator",
    "PureState",
    "KrausChannel",
    "PovmSet",
    "dimension_cap",
    "identity",
    "tensor",
    "permute",
    "embed",
    "partial_trace",
    "eig_hermitian",
    "operator_power",
    "apply_channel",
    "isometric_extension",
    "named_channel",
    "channel_from_json",
]

DEFAULT_DIM_CAP = 4096

HERMITICITY_TOL = 1e-10
HERMITICITY_HARD_TOL = 1e-8
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-12
KRAUS_TOL = 1e-10
POVM_TOL = 1e-9


class DimensionCapError(ValueError):
    """Raised when a construction would exceed the configured dimension cap."""


def dimension_cap() -> int:
    """Current dimension cap: ``QMAC_DIM_CAP`` if set, else 4096."""
    raw = os.environ.get("QMAC_DIM_CAP")
    if raw is None:
        return DEFAULT_DIM_CAP
    cap = int(raw)
    if cap <= 0:
        raise ValueError("QMAC_DIM_CAP must be a positive integer")
    return cap


def _check_cap(dim: int, what: str) -> None:
    cap = dimension_cap()
    if dim > cap:
        raise DimensionCapError(
            f"{what} has dimension {dim}, exceeding the cap {cap}"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


class FactorSpace:
    """An ordered list of named tensor factors with their dimensions.

    Parameters
    ----------
    labels : sequence of str
        Unique subsystem names, e.g. ``("A", "B")``.
    dims : sequence of int
        Positive dimension of each factor, aligned with ``labels``.
    """

    __slots__ = ("labels", "dims")

    def __init__(self, labels: Sequence[str], dims: Sequence[int]):
        labels = tuple(str(l) for l in labels)
        dims = tuple(int(d) for d in dims)
        if len(labels) != len(dims):
            raise ValueError("labels and dims must have equal length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate factor labels in {labels}")
        if any(d <= 0 for d in dims):
            raise ValueError("factor dimensions must be positive")
        _check_cap(math.prod(dims) if dims else 1, f"space {labels}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("FactorSpace is immutable")

    @property
    def dim(self) -> int:
        return math.prod(self.dims) if self.dims else 1

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown factor label {label!r}; have {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.dims[self.axis(label)]

    def subspace(self, labels: Iterable[str]) -> "FactorSpace":
        labels = tuple(labels)
        return FactorSpace(labels, tuple(self.dim_of(l) for l in labels))

    def drop(self, labels: Iterable[str]) -> "FactorSpace":
        gone = set(labels)
        for l in gone:
            self.axis(l)
        keep = tuple(l for l in self.labels if l not in gone)
        return self.subspace(keep)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FactorSpace)
            and self.labels == other.labels
            and self.dims == other.dims
        )

    def __hash__(self):
        return hash((self.labels, self.dims))

    def __repr__(self):
        inner = ", ".join(f"{l}:{d}" for l, d in zip(self.labels, self.dims))
        return f"FactorSpace({inner})"


def power_space(space: FactorSpace, n: int) -> FactorSpace:
    """n-fold copy of a space, copy-major: labels X -> X1, X2, ..., Xn."""
    labels = []
    dims = []
    for i in range(1, n + 1):
        for l, d in zip(space.labels, space.dims):
            labels.append(f"{l}{i}")
            dims.append(d)
    return FactorSpace(labels, dims)


class Operator:
    """A square matrix on a labeled factor space.  No constraints beyond shape."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: FactorSpace, matrix: np.ndarray):
        matrix = _frozen(matrix)
        if matrix.shape != (space.dim, space.dim):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match space dim {space.dim}"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, *a):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def __repr__(self):
        return f"{type(self).__name__}(space={self.space!r}, dim={self.space.dim})"


class DensityOperator(Operator):
    """A state: Hermitian, unit-trace, positive semidefinite within tolerance."""

    def __init__(self, space: FactorSpace, matrix: np.ndarray):
        super().__init__(space, matrix)
        defect = self.hermiticity_defect()
        if defect > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (defect {defect:.3e})")
        tr = self.trace
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} differs from 1")
        lo = float(np.min(np.linalg.eigvalsh(_sym(self.matrix))))
        if lo < -PSD_TOL:
            raise ValueError(f"density matrix has eigenvalue {lo:.3e} < -{PSD_TOL}")


class PureState:
    """A unit vector on a labeled factor space."""

    __slots__ = ("space", "vector")

    def __init__(self, space: FactorSpace, vector: np.ndarray):
        vector = _frozen(vector).reshape(-1)
        if vector.shape != (space.dim,):
            raise ValueError(
                f"vector length {vector.shape[0]} does not match space dim {space.dim}"
            )
        nrm = float(np.linalg.norm(vector))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector norm {nrm} differs from 1")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "vector", vector)

    def __setattr__(self, *a):
        raise AttributeError("PureState is immutable")

    def density(self) -> DensityOperator:
        return DensityOperator(self.space, np.outer(self.vector, self.vector.conj()))

    def __repr__(self):
        return f"PureState(space={self.space!r})"


def identity(space: FactorSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2.0


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------

def tensor(*ops):
    """Kronecker product with concatenated labels.

    Accepts :class:`Operator`/:class:`DensityOperator` (all of one kind) or
    :class:`PureState` inputs.  Densities stay densities and pure states stay
    pure; the result space is the concatenation of the input spaces.

    Raises
    ------
    DimensionCapError
        If the product dimension exceeds the configured cap.
    ValueError
        On duplicate labels across the inputs.
    """
    if len(ops) == 1 and isinstance(ops[0], (list, tuple)):
        ops = tuple(ops[0])
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    labels = [l for op in ops for l in op.space.labels]
    dims = [d for op in ops for d in op.space.dims]
    space = FactorSpace(labels, dims)  # checks duplicates and the cap
    if all(isinstance(op, PureState) for op in ops):
        vec = ops[0].vector
        for op in ops[1:]:
            vec = np.kron(vec, op.vector)
        return PureState(space, vec)
    mat = ops[0].matrix
    for op in ops[1:]:
        mat = np.kron(mat, op.matrix)
    if all(isinstance(op, DensityOperator) for op in ops):
        return DensityOperator(space, mat)
    return Operator(space, mat)


def _permutation(space: FactorSpace, new_labels: Sequence[str]) -> list[int]:
    new_labels = tuple(new_labels)
    if sorted(new_labels) != sorted(space.labels):
        raise ValueError(f"{new_labels} is not a permutation of {space.labels}")
    return [space.axis(l) for l in new_labels]


def permute(op, new_labels: Sequence[str]):
    """Reorder tensor factors to the given label order (same kind out)."""
    perm = _permutation(op.space, new_labels)
    space = op.space.subspace(new_labels)
    if isinstance(op, PureState):
        vec = op.vector.reshape(op.space.dims).transpose(perm).reshape(-1)
        return PureState(space, vec)
    k = len(op.space.dims)
    mat = op.matrix.reshape(op.space.dims + op.space.dims)
    mat = mat.transpose(perm + [k + p for p in perm])
    mat = mat.reshape(space.dim, space.dim)
    if isinstance(op, DensityOperator):
        return DensityOperator(space, mat)
    return Operator(space, mat)


def embed(op: Operator, target: FactorSpace) -> Operator:
    """Extend an operator by identity onto a larger labeled space.

    The operator's labels must be a subset of ``target.labels``; factor
    dimensions must agree.  The result acts as ``op`` on its own factors and
    as identity elsewhere, ordered per ``target``.
    """
    missing = [l for l in target.labels if l not in op.space.labels]
    for l in op.space.labels:
        if target.dim_of(l) != op.space.dim_of(l):
            raise ValueError(f"dimension mismatch on label {l!r}")
    if not missing:
        return permute(Operator(op.space, op.matrix), target.labels)
    rest = target.subspace(missing)
    big = tensor(Operator(op.space, op.matrix), identity(rest))
    return permute(big, target.labels)


def partial_trace(op, keep: Iterable[str]):
    """Trace out all factors not in ``keep``; the kept factors keep their order.

    Works on :class:`Operator`, :class:`DensityOperator` (stays a density) and
    :class:`PureState` (returns the reduced :class:`DensityOperator`).
    """
    if isinstance(op, PureState):
        op = op.density()
    keep = list(keep)
    for l in keep:
        op.space.axis(l)
    keep_in_order = [l for l in op.space.labels if l in set(keep)]
    k = len(op.space.dims)
    keep_axes = [op.space.axis(l) for l in keep_in_order]
    traced_axes = [i for i in range(k) if i not in keep_axes]
    t = op.matrix.reshape(op.space.dims + op.space.dims)
    for ax in sorted(traced_axes, reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    sub = op.space.subspace(keep_in_order)
    mat = t.reshape(sub.dim, sub.dim)
    out = Operator(sub, mat)
    if isinstance(op, DensityOperator):
        out = DensityOperator(sub, mat)
    if keep_in_order != keep:
        out = permute(out, keep)
    return out


# ---------------------------------------------------------------------------
# spectral operations
# ---------------------------------------------------------------------------

def _as_matrix(op) -> np.ndarray:
    if isinstance(op, Operator):
        return np.asarray(op.matrix)
    return np.asarray(op, dtype=complex)


def eig_hermitian(op):
    """Eigendecomposition of a Hermitian operator, eigenvalues descending.

    The input is symmetrized as (M + M†)/2 before decomposing; an asymmetry
    beyond 1e-8 in max-norm is treated as a caller bug and raises.  Ties are
    broken by a stable descending sort, so degenerate eigenvalues keep the
    ascending index order of the underlying LAPACK output.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Real eigenvalues, descending; eigenvectors as orthonormal columns
        aligned with the eigenvalues.
    """
    m = _as_matrix(op)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > HERMITICITY_HARD_TOL:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > 1e-8)")
    vals, vecs = np.linalg.eigh(_sym(m))
    order = np.argsort(-vals, kind="stable")
    return vals[order], vecs[:, order]


def operator_power(op, exponent: float, support_cutoff: float = 1e-12):
    """Apply ``x**exponent`` to the eigenvalues of a PSD operator.

    Eigenvalues at or below ``support_cutoff`` map to 0, which makes negative
    exponents the pseudo-inverse on the support.  An eigenvalue below -1e-9
    raises.
    """
    m = _as_matrix(op)
    vals, vecs = eig_hermitian(m)
    if float(vals.min()) < -PSD_TOL:
        raise ValueError(f"operator has eigenvalue {vals.min():.3e} < -{PSD_TOL}")
    fvals = np.array(
        [v**exponent if v > support_cutoff else 0.0 for v in vals.real]
    )
    out = (vecs * fvals) @ vecs.conj().T
    if isinstance(op, Operator):
        return Operator(op.space, out)
    return out


def support_projector(op, support_cutoff: float = 1e-12):
    """Projector onto the span of eigenvectors with eigenvalue > cutoff."""
    return operator_power(op, 0.0, support_cutoff=support_cutoff)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

class KrausChannel:
    """A completely positive trace-preserving map given by Kraus matrices.

    Parameters
    ----------
    in_space, out_space : FactorSpace
        Declared input and output factors.  A multiple access channel simply
        has two input factors (conventionally ``Ap`` and ``Bp``).
    kraus : sequence of arrays
        Matrices of shape ``(out_dim, in_dim)`` with sum K†K = identity
        within 1e-10.
    """

    __slots__ = ("in_space", "out_space", "kraus", "name")

    def __init__(self, in_space, out_space, kraus, name: str = ""):
        kraus = tuple(_frozen(k) for k in kraus)
        if not kraus:
            raise ValueError("a channel needs at least one Kraus matrix")
        shape = (out_space.dim, in_space.dim)
        for k in kraus:
            if k.shape != shape:
                raise ValueError(f"Kraus matrix shape {k.shape}, expected {shape}")
        total = sum(k.conj().T @ k for k in kraus)
        defect = float(np.max(np.abs(total - np.eye(in_space.dim))))
        if defect > KRAUS_TOL:
            raise ValueError(f"sum K†K deviates from identity by {defect:.3e}")
        object.__setattr__(self, "in_space", in_space)
        object.__setattr__(self, "out_space", out_space)
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "name", str(name))

    def __setattr__(self, *a):
        raise AttributeError("KrausChannel is immutable")

    @property
    def is_mac(self) -> bool:
        return len(self.in_space.labels) == 2

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return (
            f"KrausChannel{tag}({self.in_space.labels} -> {self.out_space.labels}, "
            f"{len(self.kraus)} Kraus)"
        )


def apply_channel(ch: KrausChannel, state, acting_on=None, out_labels=None):
    """Apply a channel to named factors of a state, identity elsewhere.

    Parameters
    ----------
    ch : KrausChannel
    state : DensityOperator or Operator
    acting_on : sequence of labels, optional
        Labels of ``state`` fed to the channel inputs, in the channel's input
        order.  Defaults to the channel's own input labels.
    out_labels : sequence of labels, optional
        Names for the channel outputs in the result (defaults to the
        channel's output labels); must not collide with untouched factors.
    """
    acting_on = tuple(acting_on) if acting_on is not None else ch.in_space.labels
    out_labels = tuple(out_labels) if out_labels is not None else ch.out_space.labels
    if len(acting_on) != len(ch.in_space.labels):
        raise ValueError("acting_on must name one label per channel input factor")
    if len(out_labels) != len(ch.out_space.labels):
        raise ValueError("out_labels must name one label per channel output factor")
    for l, d in zip(acting_on, ch.in_space.dims):
        if state.space.dim_of(l) != d:
            raise ValueError(
                f"label {l!r} has dimension {state.space.dim_of(l)}, channel wants {d}"
            )
    rest = [l for l in state.space.labels if l not in set(acting_on)]
    if set(out_labels) & set(rest):
        raise ValueError(f"output labels {out_labels} collide with {rest}")
    moved = permute(Operator(state.space, state.matrix), list(acting_on) + rest)
    rest_space = state.space.subspace(rest) if rest else None
    d_rest = rest_space.dim if rest_space else 1
    new_space = FactorSpace(
        out_labels + tuple(rest),
        ch.out_space.dims + (rest_space.dims if rest_space else ()),
    )
    eye = np.eye(d_rest)
    acc = np.zeros((new_space.dim, new_space.dim), dtype=complex)
    for k in ch.kraus:
        kf = np.kron(k, eye)
        acc += kf @ moved.matrix @ kf.conj().T
    if isinstance(state, DensityOperator):
        return DensityOperator(new_space, acc)
    return Operator(new_space, acc)


def isometric_extension(ch: KrausChannel, env_label: str = "E"):
    """Stinespring isometry V = sum_i K_i (x) |i>_E and its output space.

    Returns ``(V, out_space)`` where ``V`` has shape
    ``(out_dim * n_kraus, in_dim)`` and ``out_space`` appends an environment
    factor of dimension ``n_kraus`` after the channel outputs.
    """
    n_env = len(ch.kraus)
    space = FactorSpace(
        ch.out_space.labels + (env_label,), ch.out_space.dims + (n_env,)
    )
    d_out = ch.out_space.dim
    v = np.zeros((d_out * n_env, ch.in_space.dim), dtype=complex)
    for i, k in enumerate(ch.kraus):
        env = np.zeros(n_env)
        env[i] = 1.0
        v += np.kron(k, env[:, None])
    return v, space


def apply_isometry_to_state(ch: KrausChannel, state: PureState,
                            acting_on=None, out_labels=None,
                            env_label: str = "E") -> PureState:
    """Purified channel application: send named factors through V = sum K (x) |i>."""
    acting_on = tuple(acting_on) if acting_on is not None else ch.in_space.labels
    out_labels = tuple(out_labels) if out_labels is not None else ch.out_space.labels
    v, vspace = isometric_extension(ch, env_label=env_label)
    rest = [l for l in state.space.labels if l not in set(acting_on)]
    moved = permute(state, list(acting_on) + rest)
    d_in = ch.in_space.dim
    d_rest = moved.space.dim // d_in
    vec = moved.vector.reshape(d_in, d_rest)
    out = (v @ vec).reshape(-1)
    new_space = FactorSpace(
        out_labels + (env_label,) + tuple(rest),
        ch.out_space.dims + (len(ch.kraus),) + tuple(
            state.space.dim_of(l) for l in rest
        ),
    )
    return PureState(new_space, out)


# ---------------------------------------------------------------------------
# POVMs
# ---------------------------------------------------------------------------

class PovmSet:
    """An indexed family of positive operators with sum at most the identity.

    The completion element ``I - sum`` is kept implicit; :meth:`completion`
    materializes it.  Each element must be Hermitian with eigenvalues in
    [-1e-9, 1 + 1e-9], and the family total must satisfy sum <= I + 1e-9.
    """

    __slots__ = ("space", "elements")

    def __init__(self, space: FactorSpace, elements):
        elements = dict(elements)
        if not elements:
            raise ValueError("a POVM needs at least one element")
        total = np.zeros((space.dim, space.dim), dtype=complex)
        frozen = {}
        for key, mat in elements.items():
            mat = _frozen(mat)
            if mat.shape != (space.dim, space.dim):
                raise ValueError(f"element {key!r} has shape {mat.shape}")
            defect = float(np.max(np.abs(mat - mat.conj().T)))
            if defect > POVM_TOL:
                raise ValueError(f"element {key!r} not Hermitian (defect {defect:.3e})")
            vals = np.linalg.eigvalsh(_sym(mat))
            if vals.min() < -POVM_TOL or vals.max() > 1 + POVM_TOL:
                raise ValueError(
                    f"element {key!r} has eigenvalues in "
                    f"[{vals.min():.3e}, {vals.max():.3e}], outside [0, 1]"
                )
            total += mat
            frozen[key] = mat
        gap = np.linalg.eigvalsh(_sym(np.eye(space.dim) - total))
        if gap.min() < -POVM_TOL:
            raise ValueError(
                f"POVM elements sum beyond identity (min gap eigenvalue {gap.min():.3e})"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "elements", frozen)

    def __setattr__(self, *a):
        raise AttributeError("PovmSet is immutable")

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, key) -> np.ndarray:
        return self.elements[key]

    def keys(self):
        return self.elements.keys()

    def total(self) -> np.ndarray:
        return sum(self.elements.values())

    def completion(self) -> np.ndarray:
        """The implicit abort element I - sum(elements)."""
        return np.eye(self.space.dim) - self.total()


# ---------------------------------------------------------------------------
# named channels and the JSON wire format
# ---------------------------------------------------------------------------

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=complex,
)


def named_channel(name: str) -> KrausChannel:
    """Construct one of the built-in channels.

    ``identity:d``
        The identity channel on a d-dimensional input.
    ``depolarizing:p``
        Qubit depolarizing channel rho -> (1-p) rho + p I/2.
    ``amplitude-damping:g``
        Qubit amplitude damping with decay probability g.
    ``cnot-mac``
        Two-qubit multiple access channel: CNOT (control ``Ap``, target
        ``Bp``) followed by computational-basis dephasing of both output
        qubits; ``C`` is the dim-4 composite output and the dephasing
        ancilla is the traced environment.
    ``adder-mac``
        Classical integer adder embedded as a dephasing MAC: computational
        inputs x, y produce |x+y> in a 3-dimensional output register.
    """
    kind, _, arg = name.partition(":")
    if kind == "identity":
        d = int(arg) if arg else 2
        if d < 1:
            raise ValueError("identity channel needs dimension >= 1")
        return KrausChannel(
            FactorSpace(("Ap",), (d,)), FactorSpace(("B",), (d,)),
            [np.eye(d)], name=name,
        )
    if kind == "depolarizing":
        p = float(arg) if arg else 1.0
        if not 0.0 <= p <= 4.0 / 3.0:
            raise ValueError("depolarizing parameter must lie in [0, 4/3]")
        kraus = [
            math.sqrt(max(1 - 3 * p / 4, 0.0)) * np.eye(2),
            math.sqrt(p / 4) * _PAULI_X,
            math.sqrt(p / 4) * _PAULI_Y,
            math.sqrt(p / 4) * _PAULI_Z,
        ]
        return KrausChannel(
            FactorSpace(("Ap",), (2,)), FactorSpace(("B",), (2,)), kraus, name=name
        )
    if kind == "amplitude-damping":
        g = float(arg) if arg else 0.5
        if not 0.0 <= g <= 1.0:
            raise ValueError("damping probability must lie in [0, 1]")
        k0 = np.array([[1, 0], [0, math.sqrt(1 - g)]], dtype=complex)
        k1 = np.array([[0, math.sqrt(g)], [0, 0]], dtype=complex)
        return KrausChannel(
            FactorSpace(("Ap",), (2,)), FactorSpace(("B",), (2,)), [k0, k1], name=name
        )
    if kind == "cnot-mac":
        kraus = []
        for a in range(2):
            for b in range(2):
                proj = np.zeros((4, 4), dtype=complex)
                proj[2 * a + b, 2 * a + b] = 1.0
                kraus.append(proj @ _CNOT)
        return KrausChannel(
            FactorSpace(("Ap", "Bp"), (2, 2)), FactorSpace(("C",), (4,)),
            kraus, name=name,
        )
    if kind == "adder-mac":
        kraus = []
        for x in range(2):
            for y in range(2):
                k = np.zeros((3, 4), dtype=complex)
                k[x + y, 2 * x + y] = 1.0
                kraus.append(k)
        return KrausChannel(
            FactorSpace(("Ap", "Bp"), (2, 2)), FactorSpace(("C",), (3,)),
            kraus, name=name,
        )
    raise ValueError(f"unknown named channel {name!r}")


def channel_from_json(obj: dict) -> KrausChannel:
    """Build a channel from the wire format.

    The object carries ``in_dims`` (one entry per sender), ``out_dims`` and
    ``kraus``: a list of matrices, each a flat row-major list of
    ``[re, im]`` entry pairs (a nested rows-of-pairs layout is also
    accepted).  One input factor is labeled ``Ap`` (output ``B``); two
    input factors are labeled ``Ap``/``Bp`` (output ``C`` or ``C1``,
    ``C2``, ...).
    """
    in_dims = tuple(int(d) for d in obj["in_dims"])
    out_dims = tuple(int(d) for d in obj["out_dims"])
    if len(in_dims) == 1:
        in_labels = ("Ap",)
        out_labels = ("B",) if len(out_dims) == 1 else tuple(
            f"B{i+1}" for i in range(len(out_dims))
        )
    elif len(in_dims) == 2:
        in_labels = ("Ap", "Bp")
        out_labels = ("C",) if len(out_dims) == 1 else tuple(
            f"C{i+1}" for i in range(len(out_dims))
        )
    else:
        raise ValueError("channels support one or two input factors")
    d_in = math.prod(in_dims)
    d_out = math.prod(out_dims)
    kraus = []
    for mat in obj["kraus"]:
        arr = np.asarray(mat, dtype=float)
        if arr.ndim == 2 and arr.shape == (d_out * d_in, 2):
            flat = arr[:, 0] + 1j * arr[:, 1]
            kraus.append(flat.reshape(d_out, d_in))
        elif arr.ndim == 3 and arr.shape == (d_out, d_in, 2):
            kraus.append(arr[:, :, 0] + 1j * arr[:, :, 1])
        else:
            raise ValueError(
                f"Kraus entry has shape {arr.shape}; expected "
                f"{d_out * d_in} row-major [re, im] pairs"
            )
    return KrausChannel(
        FactorSpace(in_labels, in_dims), FactorSpace(out_labels, out_dims), kraus
    )


def channel_to_json(ch: KrausChannel) -> dict:
    """Inverse of :func:`channel_from_json` (labels are regenerated on read)."""
    return {
        "in_dims": list(ch.in_space.dims),
        "out_dims": list(ch.out_space.dims),
        "kraus": [
            [[float(e.real), float(e.imag)] for e in k.reshape(-1)]
            for k in ch.kraus
        ],
    }
