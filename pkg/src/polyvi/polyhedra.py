"""Polyhedral sets ``{x : Cx <= b, Ex = d}``, their cones, faces and generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space, orth
from scipy.optimize import linprog, nnls

FACE_CAP = 20
GENERATOR_CAP = 24
RANK_RTOL = 1e-9
_FEAS_TOL = 1e-9


class CapExceeded(RuntimeError):
    """Combinatorial enumeration would exceed the configured cap."""


class EmptySetError(ValueError):
    """The constraint system has no feasible point."""


def _as_matrix(M, n):
    M = np.asarray(M if M is not None else [], dtype=float)
    if M.size == 0:
        return np.zeros((0, n))
    return np.atleast_2d(M)


def _as_vector(v, k):
    v = np.asarray(v if v is not None else [], dtype=float).ravel()
    if v.size == 0 and k == 0:
        return np.zeros(0)
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _matrix_rank(M):
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * max(s[0], 1.0)))


@dataclass(frozen=True)
class GeneratorRep:
    """``conv(vertices) + cone(rays) + span(lineality)``.

    Rays have unit Euclidean norm; every list is sorted lexicographically.
    """

    vertices: np.ndarray
    rays: np.ndarray
    lineality: np.ndarray

    @property
    def n(self):
        return self.vertices.shape[1] if self.vertices.size else self.rays.shape[1]

    def is_trivial_cone(self):
        return len(self.rays) == 0 and len(self.lineality) == 0


def _canonical_rows(rows, n, normalize=False, tol=1e-9):
    rows = [np.asarray(r, dtype=float) for r in rows]
    if normalize:
        rows = [r / np.linalg.norm(r) for r in rows if np.linalg.norm(r) > tol]
    uniq = []
    for r in rows:
        if not any(np.max(np.abs(r - u)) <= tol * max(1.0, np.max(np.abs(u))) for u in uniq):
            uniq.append(r)
    uniq.sort(key=lambda r: tuple(np.round(r, 12)))
    return _frozen(np.array(uniq).reshape(len(uniq), n))


class PolyhedralSet:
    """The polyhedron ``{x : C x <= b, E x = d}``.

    Nonemptiness is checked by an LP at construction; an empty system raises
    :class:`EmptySetError`.
    """

    def __init__(self, C=None, b=None, E=None, d=None, n=None, check=True):
        if n is None:
            for M in (C, E):
                M = np.asarray(M if M is not None else [], dtype=float)
                if M.size:
                    n = np.atleast_2d(M).shape[1]
                    break
        if n is None:
            raise ValueError("dimension n cannot be inferred from empty constraints")
        self.n = int(n)
        self.C = _frozen(_as_matrix(C, self.n))
        self.b = _frozen(_as_vector(b, len(self.C)))
        self.E = _frozen(_as_matrix(E, self.n))
        self.dvec = _frozen(_as_vector(d, len(self.E)))
        if self.C.shape[1] != self.n or self.E.shape[1] != self.n:
            raise ValueError("constraint matrices disagree on the dimension")
        if self.b.shape != (len(self.C),) or self.dvec.shape != (len(self.E),):
            raise ValueError("right-hand sides do not match the constraint rows")
        self._faces = None
        self._generators = None
        if check and self.feasible_point() is None:
            raise EmptySetError("constraint system is infeasible")

    # constructors

    @classmethod
    def orthant(cls, n):
        return cls(-np.eye(n), np.zeros(n))

    @classmethod
    def box(cls, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        n = len(lo)
        return cls(np.vstack([np.eye(n), -np.eye(n)]), np.concatenate([hi, -lo]))

    @classmethod
    def whole_space(cls, n):
        return cls(n=n)

    @property
    def s(self):
        return len(self.C)

    @property
    def t(self):
        return len(self.E)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, s={self.s}, t={self.t})"

    def to_json(self):
        return {"C": self.C.tolist(), "b": self.b.tolist(), "E": self.E.tolist(), "d": self.dvec.tolist()}

    @classmethod
    def from_json(cls, obj, n=None):
        return cls(obj.get("C"), obj.get("b"), obj.get("E"), obj.get("d"), n=n)

    # membership and LPs

    def contains(self, x, tol=1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            return False
        ok = True
        if self.s:
            ok = bool(np.all(self.C @ x <= self.b + tol))
        if ok and self.t:
            ok = bool(np.all(np.abs(self.E @ x - self.dvec) <= tol))
        return ok

    def active_set(self, x, tol=1e-9) -> tuple:
        x = np.asarray(x, dtype=float)
        if not self.s:
            return ()
        return tuple(int(i) for i in np.flatnonzero(np.abs(self.C @ x - self.b) <= tol))

    def feasible_point(self):
        res = linprog(
            np.zeros(self.n),
            A_ub=self.C if self.s else None,
            b_ub=self.b if self.s else None,
            A_eq=self.E if self.t else None,
            b_eq=self.dvec if self.t else None,
            bounds=[(None, None)] * self.n,
            method="highs",
        )
        return res.x if res.status == 0 else None

    def _face_interior(self, alpha):
        """Point of the pseudo-face ``alpha`` with maximal slack, or None."""
        alpha = list(alpha)
        rest = [i for i in range(self.s) if i not in set(alpha)]
        n = self.n
        # variables (x, slack); maximize slack subject to strict rows
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A_ub = b_ub = None
        if rest:
            A_ub = np.hstack([self.C[rest], np.ones((len(rest), 1))])
            b_ub = self.b[rest]
        eq_rows = [np.hstack([self.C[alpha], np.zeros((len(alpha), 1))])] if alpha else []
        eq_rhs = [self.b[alpha]] if alpha else []
        if self.t:
            eq_rows.append(np.hstack([self.E, np.zeros((self.t, 1))]))
            eq_rhs.append(self.dvec)
        A_eq = np.vstack(eq_rows) if eq_rows else None
        b_eq = np.concatenate(eq_rhs) if eq_rhs else None
        bounds = [(None, None)] * n + [(None, 1.0)]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status != 0:
            return None
        x, slack = res.x[:n], res.x[-1]
        if rest and slack <= _FEAS_TOL:
            return None
        return x

    # structure

    def recession_cone(self) -> "PolyhedralCone":
        return PolyhedralCone(self.C, self.E)

    def pseudo_faces(self, cap=FACE_CAP) -> list:
        """All nonempty pseudo-faces, ordered by ``alpha`` (size, then lex)."""
        if self._faces is not None:
            return self._faces
        if self.s > cap:
            raise CapExceeded(f"{self.s} inequalities exceed the pseudo-face cap {cap}")
        faces = []
        for k in range(self.s + 1):
            for alpha in itertools.combinations(range(self.s), k):
                x = self._face_interior(alpha)
                if x is not None:
                    faces.append(PseudoFace(self, alpha, x))
        self._faces = faces
        return faces

    def face_of(self, x, tol=1e-9):
        alpha = self.active_set(x, tol)
        for f in self.pseudo_faces():
            if f.alpha == alpha:
                return f
        return None

    def licq_check(self) -> "LICQResult":
        for face in self.pseudo_faces():
            M = np.vstack([self.C[list(face.alpha)], self.E]) if face.alpha or self.t else np.zeros((0, self.n))
            if _matrix_rank(M) < len(M):
                return LICQResult(False, face, face.witness)
        return LICQResult(True)

    def generators(self, cap=GENERATOR_CAP) -> GeneratorRep:
        if self._generators is None:
            self._generators = _enumerate_generators(self, cap)
        return self._generators

    def lp_minimize(self, c, tol=0.0) -> "LPResult":
        """Minimize ``<c, x>`` over the set using its generator representation."""
        c = np.asarray(c, dtype=float)
        gens = self.generators()
        for l in gens.lineality:
            v = float(c @ l)
            if abs(v) > tol:
                return LPResult(False, -np.inf, None, -np.sign(v) * l)
        for r in gens.rays:
            if float(c @ r) < -tol:
                return LPResult(False, -np.inf, None, r.copy())
        vals = gens.vertices @ c
        i = int(np.argmin(vals))
        return LPResult(True, float(vals[i]), gens.vertices[i].copy(), None)

    def sample(self, rng, k, scale=1.0):
        """Random points of the set from its generators (for tests and probes)."""
        gens = self.generators()
        pts = []
        for _ in range(k):
            w = rng.dirichlet(np.ones(len(gens.vertices)))
            x = w @ gens.vertices
            for r in gens.rays:
                x = x + scale * rng.exponential() * r * (rng.random() < 0.7)
            for l in gens.lineality:
                x = x + scale * rng.normal() * l
            pts.append(x)
        return np.array(pts).reshape(k, self.n)


class PolyhedralCone(PolyhedralSet):
    """The cone ``{x : C x <= 0, E x = 0}``."""

    def __init__(self, C=None, E=None, n=None):
        if n is None:
            for M in (C, E):
                M = np.asarray(M if M is not None else [], dtype=float)
                if M.size:
                    n = np.atleast_2d(M).shape[1]
                    break
        Cm = _as_matrix(C, n) if n is not None else None
        Em = _as_matrix(E, n) if n is not None else None
        super().__init__(
            Cm, np.zeros(len(Cm)) if Cm is not None else None,
            Em, np.zeros(len(Em)) if Em is not None else None,
            n=n, check=False,
        )

    def recession_cone(self):
        return self

    def is_trivial(self) -> bool:
        return self.generators().is_trivial_cone()

    def dual_cone(self) -> GeneratorRep:
        """Generators of ``{y : <y, x> >= 0 for all x in the cone}``."""
        n = self.n
        gens = self.generators()
        span_rows = np.vstack([gens.rays, gens.lineality]) if (len(gens.rays) + len(gens.lineality)) else np.zeros((0, n))
        # lineality of the dual is the orthogonal complement of span(K)
        if len(span_rows):
            lin = null_space(span_rows, rcond=RANK_RTOL).T
        else:
            lin = np.eye(n)
        proj = np.eye(n) - (lin.T @ lin if len(lin) else 0.0)
        cands = []
        for row in self.C:
            v = proj @ (-row)
            if np.linalg.norm(v) > 1e-12:
                cands.append(v / np.linalg.norm(v))
        cands = list(_canonical_rows(cands, n))
        # drop rays that are nonnegative combinations of the others
        extreme = []
        for i, r in enumerate(cands):
            others = [c for j, c in enumerate(cands) if j != i]
            if others:
                M = np.array(others).T
                _, resid = nnls(M, r)
                if resid < 1e-9:
                    continue
            extreme.append(r)
        lin_rep = _canonical_rows(orth(lin.T).T if len(lin) else [], n)
        return GeneratorRep(_frozen(np.zeros((1, n))), _canonical_rows(extreme, n), lin_rep)


@dataclass(frozen=True)
class PseudoFace:
    """``{x in K : C_i x = b_i (i in alpha), C_i x < b_i (i not in alpha)}``."""

    K: PolyhedralSet = field(repr=False)
    alpha: tuple
    witness: np.ndarray = field(repr=False, compare=False)

    @property
    def rest(self):
        a = set(self.alpha)
        return tuple(i for i in range(self.K.s) if i not in a)

    def contains(self, x, tol=1e-9) -> bool:
        return self.K.contains(x, tol) and self.K.active_set(x, tol) == self.alpha

    def label(self):
        return list(self.alpha)


@dataclass(frozen=True)
class LICQResult:
    holds: bool
    face: PseudoFace | None = None
    witness: np.ndarray | None = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class LPResult:
    bounded: bool
    value: float
    point: np.ndarray | None
    ray: np.ndarray | None


def int_dual_membership(gens: GeneratorRep, q, tol=1e-12) -> bool:
    """Is ``q`` in the interior of the dual of the cone generated by ``gens``?

    True iff ``<v, q> > 0`` on every nonzero ``v`` of the cone. A nontrivial
    lineality space contains ``v`` and ``-v``, so the answer is then False.
    """
    q = np.asarray(q, dtype=float)
    if len(gens.lineality):
        return False
    return all(float(r @ q) > tol for r in gens.rays)


def _enumerate_generators(K: PolyhedralSet, cap) -> GeneratorRep:
    n = K.n
    if K.s + K.t > cap:
        raise CapExceeded(f"{K.s + K.t} constraints exceed the generator cap {cap}")
    M = np.vstack([K.C, K.E])
    lin = null_space(M, rcond=RANK_RTOL).T if len(M) else np.eye(n)
    if len(M):
        W = orth(M.T, rcond=RANK_RTOL)  # n x k, complement of the lineality
    else:
        W = np.zeros((n, 0))
    k = W.shape[1]
    if k == 0:
        return GeneratorRep(_frozen(np.zeros((1, n))), _frozen(np.zeros((0, n))), _canonical_rows(lin, n))
    CW, EW = K.C @ W, K.E @ W
    tol = 1e-9

    def feasible_y(y):
        ok = np.all(CW @ y <= K.b + tol * (1 + np.abs(K.b))) if K.s else True
        if ok and K.t:
            ok = np.all(np.abs(EW @ y - K.dvec) <= tol * (1 + np.abs(K.dvec)))
        return ok

    # vertices: k linearly independent active rows among E and a subset of C
    verts = []
    rank_E = _matrix_rank(EW) if K.t else 0
    need = k - rank_E
    if need >= 0:
        for S in itertools.combinations(range(K.s), need):
            S = list(S)
            A = np.vstack([CW[S], EW]) if K.t else CW[S]
            rhs = np.concatenate([K.b[S], K.dvec]) if K.t else K.b[S]
            if _matrix_rank(A) < k:
                continue
            y = np.linalg.lstsq(A, rhs, rcond=None)[0]
            if np.max(np.abs(A @ y - rhs), initial=0.0) > 1e-8 * (1 + np.max(np.abs(rhs), initial=0.0)):
                continue
            if feasible_y(y):
                verts.append(W @ y)

    # extreme rays of the pointed recession cone: rank k-1 active systems
    rays = []
    if need >= 1:
        for S in itertools.combinations(range(K.s), need - 1):
            S = list(S)
            A = np.vstack([CW[S], EW]) if K.t else CW[S]
            if len(A) and _matrix_rank(A) < k - 1:
                continue
            N = null_space(A, rcond=RANK_RTOL) if len(A) else np.eye(k)
            if N.shape[1] != 1:
                continue
            v = N[:, 0]
            for sgn in (1.0, -1.0):
                w = sgn * v
                if np.all(CW @ w <= tol):
                    rays.append(W @ w)
    return GeneratorRep(
        _canonical_rows(verts, n),
        _canonical_rows(rays, n, normalize=True),
        _canonical_rows(lin, n),
    )
