"""
Role-filler binding under two interchangeable backends.

``Backend.tensor()`` binds with the outer product and unbinds with a partial
inner product; ``Backend.hrr(dim)`` binds with circular convolution and
unbinds with circular correlation.

Orientation is fixed library-wide: an encoded structure keeps the FILLER on
the output side (matrix rows) and the ROLE on the cue side (columns), so
``unbind(encode(s), role)`` returns a filler.  :func:`unbind_role` performs the
complementary extraction (filler cue in, role out), which the learning rules
need.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import as_vector, circ_conv, circ_corr, matvec, normalize, outer
from .errors import DimensionError, EmptyStructureError, InvalidDimensionError, SingularRolesError

__all__ = [
    "Backend",
    "TENSOR",
    "RoleFillerStructure",
    "encode",
    "UnbindingBasis",
    "dual_basis",
    "unbind",
    "unbind_role",
    "CleanupMemory",
    "cleanup",
    "full_ranking",
    "MAX_GRAM_CONDITION",
]

MAX_GRAM_CONDITION = 1e12


@dataclass(frozen=True)
class Backend:
    kind: str
    dim: int | None = None

    def __post_init__(self):
        if self.kind == "tensor":
            if self.dim is not None:
                raise ValueError("tensor backend takes no dimension")
        elif self.kind == "hrr":
            if self.dim is None or isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 2:
                raise InvalidDimensionError(f"hrr backend needs dim >= 2, got {self.dim!r}")
            object.__setattr__(self, "dim", int(self.dim))
        else:
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @classmethod
    def tensor(cls):
        return cls("tensor")

    @classmethod
    def hrr(cls, dim):
        return cls("hrr", dim)

    @classmethod
    def parse(cls, text):
        """Parse ``"tensor"`` or ``"hrr:<dim>"``."""
        text = str(text).strip().lower()
        if text == "tensor":
            return cls.tensor()
        if text.startswith("hrr:"):
            try:
                dim = int(text[4:])
            except ValueError:
                raise ValueError(f"bad hrr dimension in {text!r}") from None
            return cls.hrr(dim)
        raise ValueError(f"cannot parse backend {text!r}")

    @property
    def is_tensor(self):
        return self.kind == "tensor"

    def to_json(self):
        return {"kind": self.kind} if self.is_tensor else {"kind": self.kind, "dim": self.dim}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            return cls.parse(obj)
        return cls(obj["kind"], obj.get("dim"))

    def __str__(self):
        return "tensor" if self.is_tensor else f"hrr:{self.dim}"

    def bind(self, filler, role):
        """Bind a single (filler, role) pair in library orientation."""
        if self.is_tensor:
            return outer(filler, role)
        f = as_vector(filler, "filler")
        r = as_vector(role, "role")
        if f.shape[0] != self.dim or r.shape[0] != self.dim:
            raise DimensionError(f"hrr:{self.dim} cannot bind vectors of dims {f.shape[0]}, {r.shape[0]}")
        return circ_conv(f, r)


TENSOR = Backend.tensor()


@dataclass(frozen=True)
class RoleFillerStructure:
    """Ordered (role, filler) pairs awaiting encoding."""

    pairs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pairs = tuple((as_vector(r, "role"), as_vector(f, "filler")) for r, f in self.pairs)
        if not pairs:
            raise EmptyStructureError("a role-filler structure needs at least one pair")
        rdim = {r.shape[0] for r, _ in pairs}
        fdim = {f.shape[0] for _, f in pairs}
        if len(rdim) != 1 or len(fdim) != 1:
            raise DimensionError(f"inconsistent dims: roles {sorted(rdim)}, fillers {sorted(fdim)}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def role_dim(self):
        return self.pairs[0][0].shape[0]

    @property
    def filler_dim(self):
        return self.pairs[0][1].shape[0]

    def __len__(self):
        return len(self.pairs)


def encode(structure, backend):
    """Sum of bound pairs: ``sum_i outer(f_i, r_i)`` or ``sum_i f_i (*) r_i``."""
    if not isinstance(structure, RoleFillerStructure):
        structure = RoleFillerStructure(tuple(structure))
    if not backend.is_tensor and (structure.role_dim != backend.dim or structure.filler_dim != backend.dim):
        raise DimensionError(
            f"hrr:{backend.dim} needs role and filler dim {backend.dim}, "
            f"got {structure.role_dim} and {structure.filler_dim}"
        )
    total = None
    for role, filler in structure.pairs:
        term = backend.bind(filler, role)
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class UnbindingBasis:
    roles: tuple
    duals: tuple


def dual_basis(roles):
    """Unbinding vectors ``u_j`` with ``<r_i, u_j> = delta_ij``.

    The duals live in the span of the roles: ``U = R^T G^{-1}`` where
    ``G = R R^T`` is the Gram matrix.  For an orthonormal role set ``G = I`` and
    each role is its own dual.

    Raises
    ------
    SingularRolesError
        If the Gram matrix condition number exceeds ``MAX_GRAM_CONDITION``.
    """
    vecs = [as_vector(r, "role") for r in roles]
    if not vecs:
        raise EmptyStructureError("dual_basis needs at least one role")
    dims = {v.shape[0] for v in vecs}
    if len(dims) != 1:
        raise DimensionError(f"roles have mixed dims {sorted(dims)}")
    R = np.vstack(vecs)
    k, d = R.shape
    if k > d:
        raise SingularRolesError(f"{k} roles in dimension {d} cannot be independent")
    G = R @ R.T
    cond = float(np.linalg.cond(G))
    if not np.isfinite(cond) or cond > MAX_GRAM_CONDITION:
        raise SingularRolesError(f"role Gram matrix is ill-conditioned (cond ~ {cond:.3g})", cond)
    U = np.linalg.solve(G, R)
    return UnbindingBasis(tuple(vecs), tuple(U[i].copy() for i in range(k)))


def unbind(encoded, cue, backend):
    """Extract the filler bound to the role matched by ``cue``.

    Tensor: ``encoded @ cue``; exact when ``cue`` is the role's dual.
    HRR: ``circ_corr(encoded, cue)``; the filler plus crosstalk noise.  No
    cleanup or normalization is applied.
    """
    if backend.is_tensor:
        return matvec(encoded, cue)
    return circ_corr(encoded, cue)


def unbind_role(encoded, filler_cue, backend):
    """Extract the role bound to the filler matched by ``filler_cue``.

    Tensor: ``encoded.T @ filler_cue``.  HRR: convolution is commutative, so
    this is the same correlation as :func:`unbind`.
    """
    if backend.is_tensor:
        m = np.asarray(encoded, dtype=np.float64)
        if m.ndim != 2:
            raise DimensionError(f"expected a matrix, got shape {m.shape}")
        return matvec(m.T, filler_cue)
    return circ_corr(encoded, filler_cue)


class CleanupMemory:
    """Named unit vectors queried by nearest cosine.

    Stored vectors are normalized on construction.  The memory is immutable;
    ``names`` and ``matrix`` are read-only views.
    """

    def __init__(self, entries, threshold=-1.0):
        entries = list(entries.items()) if isinstance(entries, dict) else list(entries)
        if not entries:
            raise EmptyStructureError("cleanup memory needs at least one entry")
        if not -1.0 <= threshold <= 1.0:
            raise ValueError(f"threshold must lie in [-1, 1], got {threshold}")
        names = [str(n) for n, _ in entries]
        if len(set(names)) != len(names):
            raise ValueError("cleanup memory names must be unique")
        rows = [normalize(as_vector(v, n)) for n, v in entries]
        if len({r.shape[0] for r in rows}) != 1:
            raise DimensionError("cleanup memory vectors must share one dimension")
        self._names = tuple(names)
        self._matrix = np.vstack(rows)
        self._matrix.setflags(write=False)
        self.threshold = float(threshold)

    @property
    def names(self):
        return self._names

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[1]

    def __len__(self):
        return len(self._names)

    def vector(self, name):
        return self._matrix[self._names.index(name)]

    def scores(self, query):
        q = as_vector(query, "query")
        if q.shape[0] != self.dim:
            raise DimensionError(f"query dim {q.shape[0]} != memory dim {self.dim}")
        q = normalize(q)
        return np.clip(self._matrix @ q, -1.0, 1.0)


def full_ranking(query, memory):
    """All entries as ``(name, score)``, by descending cosine then name."""
    s = memory.scores(query)
    order = sorted(range(len(memory)), key=lambda i: (-s[i], memory.names[i]))
    return [(memory.names[i], float(s[i])) for i in order]


def cleanup(query, memory):
    """Best ``(name, score)`` match, or ``None`` if below the memory threshold."""
    name, score = full_ranking(query, memory)[0]
    if score < memory.threshold:
        return None
    return name, score

