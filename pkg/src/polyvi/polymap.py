"""Polynomial maps P: R^n -> R^n stored as coefficient matrices.

A map of degree at most ``d`` is a dense ``n x m`` matrix ``A`` against the
monomial vector ``X(x)`` with ``m = C(n+d, d)`` entries, so ``P(x) = A X(x)``.
Monomials are ordered by ascending total degree and, inside one degree,
by decreasing lexicographic order of exponent vectors::

    1, x1, ..., xn, x1^2, x1 x2, ..., xn^2, ..., x1^d, ..., xn^d

The ordering is part of the JSON format and is never inferred.
"""

from __future__ import annotations

import itertools
import math
import warnings
from functools import lru_cache

import numpy as np

from . import _backend


class DimensionError(ValueError):
    """Raised when vector or basis dimensions do not agree."""


def _exponents_of_degree(n, k):
    # all a in N^n with |a| = k, decreasing lex
    out = []
    for combo in itertools.combinations_with_replacement(range(n), k):
        a = [0] * n
        for j in combo:
            a[j] += 1
        out.append(tuple(a))
    return sorted(set(out), reverse=True)


@lru_cache(maxsize=None)
def _basis_exponents(n, d):
    exps = []
    for k in range(d + 1):
        exps.extend(_exponents_of_degree(n, k))
    arr = np.array(exps, dtype=np.int64).reshape(len(exps), n)
    arr.setflags(write=False)
    return arr


class MonomialBasis:
    """All monomials in ``n`` variables of total degree at most ``d``."""

    __slots__ = ("n", "d", "exponents", "degrees", "_index")

    def __init__(self, n: int, d: int):
        if n < 1 or d < 0:
            raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
        self.n = int(n)
        self.d = int(d)
        self.exponents = _basis_exponents(self.n, self.d)
        self.degrees = self.exponents.sum(axis=1)
        self._index = {tuple(a): i for i, a in enumerate(self.exponents.tolist())}

    def __len__(self):
        return len(self.exponents)

    def __eq__(self, other):
        return isinstance(other, MonomialBasis) and (self.n, self.d) == (other.n, other.d)

    def __hash__(self):
        return hash((self.n, self.d))

    def __repr__(self):
        return f"MonomialBasis(n={self.n}, d={self.d})"

    def index(self, exponent) -> int:
        """Column index of a monomial given by its exponent vector."""
        return self._index[tuple(int(a) for a in exponent)]

    def degree_slice(self, k: int) -> slice:
        """Columns holding the monomials of total degree exactly ``k``."""
        start = math.comb(self.n + k - 1, k - 1) if k > 0 else 0
        return slice(start, math.comb(self.n + k, k))

    def evaluate(self, x) -> np.ndarray:
        """The monomial vector X(x)."""
        x = np.asarray(x, dtype=float)
        return _backend.monomials(self.exponents, x.reshape(1, -1))[0]


class PolynomialMap:
    """Immutable polynomial map ``x -> coeffs @ X(x)``.

    Parameters
    ----------
    basis : MonomialBasis
        Monomial basis; ``basis.d`` is only the storage capacity, the actual
        degree is read off the nonzero columns.
    coeffs : array_like, shape (n, len(basis))
        Row ``l`` holds the coefficients of component ``P_l``.
    """

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: MonomialBasis, coeffs):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.shape != (basis.n, len(basis)):
            raise DimensionError(
                f"coefficient matrix must be {basis.n}x{len(basis)}, got {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        self.basis = basis
        self.coeffs = coeffs

    # construction helpers

    @classmethod
    def zeros(cls, n: int, d: int) -> "PolynomialMap":
        return cls(MonomialBasis(n, d), np.zeros((n, math.comb(n + d, d))))

    @classmethod
    def from_terms(cls, n: int, d: int, terms) -> "PolynomialMap":
        """Build from ``{(component, exponent_tuple): coefficient}``."""
        basis = MonomialBasis(n, d)
        A = np.zeros((n, len(basis)))
        for (row, exponent), value in terms.items():
            A[row, basis.index(exponent)] += value
        return cls(basis, A)

    @classmethod
    def affine(cls, M, q=None) -> "PolynomialMap":
        """The map ``x -> M x + q``."""
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        A = np.zeros((n, n + 1))
        A[:, 1:] = M
        if q is not None:
            A[:, 0] = q
        return cls(MonomialBasis(n, 1), A)

    @classmethod
    def homogeneous(cls, B, d: int) -> "PolynomialMap":
        """The map ``x -> B X_d(x)`` with ``B`` acting on degree-d monomials only."""
        B = np.asarray(B, dtype=float)
        n = B.shape[0]
        basis = MonomialBasis(n, d)
        sl = basis.degree_slice(d)
        if B.shape != (n, sl.stop - sl.start):
            raise DimensionError(f"B must be {n}x{sl.stop - sl.start}, got {B.shape}")
        A = np.zeros((n, len(basis)))
        A[:, sl] = B
        return cls(basis, A)

    # basic properties

    @property
    def n(self) -> int:
        return self.basis.n

    def __repr__(self):
        return f"PolynomialMap(n={self.n}, d={self.basis.d}, degree={self.degree()})"

    def __eq__(self, other):
        if not isinstance(other, PolynomialMap) or other.n != self.n:
            return NotImplemented
        a, b = self._common(other)
        return bool(np.array_equal(a.coeffs, b.coeffs))

    __hash__ = None

    def degree(self) -> int:
        """Largest total degree carrying a nonzero coefficient (0 for the zero map)."""
        nz = np.any(self.coeffs != 0.0, axis=0)
        if not nz.any():
            return 0
        return int(self.basis.degrees[nz].max())

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def is_homogeneous(self) -> bool:
        k = self.degree()
        mask = self.basis.degrees != k
        return not np.any(self.coeffs[:, mask])

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    # algebra

    def with_capacity(self, d: int) -> "PolynomialMap":
        """Re-embed into the basis of capacity ``d`` (must not drop terms)."""
        if d == self.basis.d:
            return self
        if d < self.degree():
            raise DimensionError(f"cannot store a degree-{self.degree()} map with capacity {d}")
        basis = MonomialBasis(self.n, d)
        m = min(len(basis), len(self.basis))
        A = np.zeros((self.n, len(basis)))
        A[:, :m] = self.coeffs[:, :m]
        return PolynomialMap(basis, A)

    def _common(self, other):
        if other.n != self.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")
        d = max(self.basis.d, other.basis.d)
        return self.with_capacity(d), other.with_capacity(d)

    def add(self, other: "PolynomialMap") -> "PolynomialMap":
        a, b = self._common(other)
        return PolynomialMap(a.basis, a.coeffs + b.coeffs)

    def __add__(self, other):
        if isinstance(other, PolynomialMap):
            return self.add(other)
        return NotImplemented

    def __neg__(self):
        return PolynomialMap(self.basis, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, PolynomialMap):
            return self.add(-other)
        return NotImplemented

    def scale(self, t: float) -> "PolynomialMap":
        return PolynomialMap(self.basis, float(t) * self.coeffs)

    def __mul__(self, t):
        if np.isscalar(t):
            return self.scale(t)
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, p) -> "PolynomialMap":
        """The map ``x -> P(x) + p``."""
        p = np.asarray(p, dtype=float).ravel()
        if p.shape != (self.n,):
            raise DimensionError(f"shift vector must have length {self.n}, got {p.shape}")
        A = self.coeffs.copy()
        A[:, 0] += p
        return PolynomialMap(self.basis, A)

    def constant_term(self) -> np.ndarray:
        return self.coeffs[:, 0].copy()

    def homogeneous_components(self) -> list:
        """``[P^0, P^1, ..., P^deg]``; component ``k`` is homogeneous of degree ``k``."""
        comps = []
        for k in range(self.degree() + 1):
            A = np.zeros_like(self.coeffs)
            sl = self.basis.degree_slice(k)
            A[:, sl] = self.coeffs[:, sl]
            comps.append(PolynomialMap(self.basis, A))
        return comps

    def leading_term(self) -> "PolynomialMap":
        """The homogeneous part of top degree, P^inf."""
        if self.is_zero():
            raise ValueError("the zero map has no leading term")
        return self.homogeneous_components()[-1]

    def homogeneous_block(self, k: int | None = None) -> np.ndarray:
        """Coefficient block ``B`` of the degree-k monomials (default: top degree)."""
        k = self.degree() if k is None else k
        return self.coeffs[:, self.basis.degree_slice(k)].copy()

    # evaluation

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DimensionError(f"expected vectors of length {self.n}, got shape {x.shape}")
        return x

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x) -> np.ndarray:
        """Evaluate at one point (shape ``(n,)``) or a batch (shape ``(B, n)``)."""
        x = self._check_x(x)
        X = np.atleast_2d(x)
        out = _backend.poly_eval(self.basis.exponents, self.coeffs, X)
        return out[0] if x.ndim == 1 else out

    def jacobian(self, x) -> np.ndarray:
        """Exact Jacobian at one point ``(n, n)`` or a batch ``(B, n, n)``."""
        x = self._check_x(x)
        X = np.atleast_2d(x)
        out = _backend.poly_jac(self.basis.exponents, self.coeffs, X)
        return out[0] if x.ndim == 1 else out

    # serialization

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.basis.d, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, obj) -> "PolynomialMap":
        n, d = int(obj["n"]), int(obj["d"])
        basis = MonomialBasis(n, d)
        P = cls(basis, np.array(obj["coeffs"], dtype=float).reshape(n, len(basis)))
        return P


def effective_degree(P: PolynomialMap, declared: int | None = None) -> int:
    """Recomputed degree; warns when it falls below ``declared``."""
    deg = P.degree()
    if declared is not None and deg < declared:
        warnings.warn(
            f"effective degree {deg} is below the declared degree {declared}",
            RuntimeWarning,
            stacklevel=2,
        )
    return deg
