"""Structural certificates for VI(K, P): R0-pairs, copositivity, monotonicity,
existence under copositivity, and a GUS probe.

Every verdict is numerical. Statuses ending in ``_numeric`` mean "no
counterexample found with the stated budget and thresholds".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .kkt import SolveConfig, VIProblem, solve, solve_cone_cp
from .polyhedra import GeneratorRep, PolyhedralSet, int_dual_membership
from .polymap import PolynomialMap

NOT_COPOSITIVE = -1e-10
COPOSITIVE_FLOOR = -1e-12


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(u) for k, u in v.items()}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# R0


@dataclass(frozen=True)
class R0Verdict:
    status: str  # r0 | not_r0 | inconclusive
    witnesses: tuple = ()
    min_merit: float = float("inf")
    starts: int = 0

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None

    def sc_generators(self, n) -> GeneratorRep:
        """Proxy generators of Sc: found witnesses as rays."""
        rays = np.array(self.witnesses).reshape(len(self.witnesses), n)
        return GeneratorRep(np.zeros((1, n)), rays, np.zeros((0, n)))

    def to_json(self):
        return _jsonable({
            "status": self.status,
            "witnesses": list(self.witnesses),
            "min_merit": self.min_merit,
            "starts": self.starts,
            "thresholds": {"nontrivial_merit": 1e-12, "trivial_merit": 1e-6},
        })


_R0_MAP = {"trivial": "r0", "nontrivial": "not_r0", "inconclusive": "inconclusive"}


def is_r0_pair(K: PolyhedralSet, P: PolynomialMap, cfg: SolveConfig | None = None) -> R0Verdict:
    """Is Sol(K^inf, P^inf) = {0}?"""
    res = solve_cone_cp(K.recession_cone(), P.leading_term(), cfg)
    return R0Verdict(_R0_MAP[res.status], res.witnesses, res.min_merit, res.starts)


def r0_scaling_invariance_check(K, P, t, cfg=None) -> bool:
    if not t > 0:
        raise ValueError("scaling factor must be positive")
    a, b = is_r0_pair(K, P, cfg), is_r0_pair(K, P.scale(t), cfg)
    return a.status == b.status and a.status != "inconclusive"


def r0_lower_degree_invariance_check(K, P, Q, cfg=None) -> bool:
    if not Q.is_zero() and Q.degree() >= P.degree():
        raise ValueError("Q must have lower degree than P")
    a, b = is_r0_pair(K, P, cfg), is_r0_pair(K, P + Q, cfg)
    return a.status == b.status


# copositivity


@dataclass(frozen=True)
class CopositivityVerdict:
    status: str  # copositive_numeric | not_copositive | inconclusive
    min_value: float
    witness: np.ndarray | None = None
    starts: int = 0
    radii: tuple = (1.0,)

    def to_json(self):
        return _jsonable({
            "status": self.status,
            "min_value": self.min_value,
            "witness": self.witness,
            "starts": self.starts,
            "radii": list(self.radii),
            "thresholds": {"not_copositive": NOT_COPOSITIVE, "copositive_floor": COPOSITIVE_FLOOR},
        })


def _face_sphere(K, face, radius):
    """Center, orthonormal basis and radius of (affine hull of face) ∩ sphere."""
    rows = np.vstack([K.C[list(face.alpha)], K.E])
    rhs = np.concatenate([K.b[list(face.alpha)], K.dvec])
    if len(rows):
        center = np.linalg.lstsq(rows, rhs, rcond=None)[0]
        basis = null_space(rows, rcond=1e-9)
    else:
        center, basis = np.zeros(K.n), np.eye(K.n)
    r2 = radius**2 - center @ center
    if r2 <= 0 or basis.shape[1] == 0:
        return None
    return center, basis, np.sqrt(r2)


def copositivity_check(P: PolynomialMap, K: PolyhedralSet, budget=32, seed=0,
                       radii=(1.0,), max_iter=300) -> CopositivityVerdict:
    """Minimize ``<P(x), x>`` over ``K ∩ {|x| = r}`` by projected gradient.

    Each pseudo-face contributes the sphere slice of its affine hull; iterates
    are kept inside ``K`` by backtracking. For a cone ``K`` and homogeneous
    ``P`` the unit sphere decides copositivity; otherwise pass extra radii.
    """
    rng = np.random.default_rng([seed, 104729])
    best, best_x = np.inf, None
    starts = 0

    def f(x):
        return float(P.eval(x) @ x)

    def grad(x):
        return P.jacobian(x).T @ x + P.eval(x)

    for radius in radii:
        for face in K.pseudo_faces():
            sph = _face_sphere(K, face, radius)
            if sph is None:
                continue
            center, B, rho = sph

            def proj(y):
                u = B.T @ (y - center)
                nu = np.linalg.norm(u)
                if nu == 0:
                    return None
                return center + B @ (rho * u / nu)

            for _ in range(budget):
                x = proj(face.witness + rng.normal(size=K.n) * max(1.0, radius))
                if x is None or not K.contains(x, 1e-12):
                    # fall back to a random direction inside the face
                    x = proj(center + B @ rng.normal(size=B.shape[1]))
                    if x is None or not K.contains(x, 1e-12):
                        continue
                starts += 1
                fx = f(x)
                step = 1.0
                for _ in range(max_iter):
                    g = grad(x)
                    moved = False
                    while step > 1e-12:
                        y = proj(x - step * g)
                        if y is not None and K.contains(y, 1e-12):
                            fy = f(y)
                            if fy < fx:
                                x, fx, moved = y, fy, True
                                step *= 2.0
                                break
                        step *= 0.5
                    if not moved:
                        break
                if fx < best:
                    best, best_x = fx, x
    if best_x is None:
        return CopositivityVerdict("copositive_numeric", 0.0, None, 0, tuple(radii))
    if best < NOT_COPOSITIVE:
        return CopositivityVerdict("not_copositive", best, best_x, starts, tuple(radii))
    if best > COPOSITIVE_FLOOR:
        return CopositivityVerdict("copositive_numeric", best, None, starts, tuple(radii))
    return CopositivityVerdict("inconclusive", best, best_x, starts, tuple(radii))


# monotonicity


@dataclass(frozen=True)
class MonotonicityVerdict:
    status: str  # strictly_monotone_numeric | monotone_numeric | not_monotone | inconclusive
    witness: tuple | None = None
    min_pair_value: float = float("inf")
    min_sym_eig: float = float("inf")
    samples: int = 0

    def to_json(self):
        return _jsonable({
            "status": self.status,
            "witness": list(self.witness) if self.witness else None,
            "min_pair_value": self.min_pair_value,
            "min_sym_eig": self.min_sym_eig,
            "samples": self.samples,
        })


def monotonicity_check(P: PolynomialMap, K: PolyhedralSet, samples=500, seed=0,
                       scale=3.0, tol=1e-12) -> MonotonicityVerdict:
    """Sampled test of ``<P(y) - P(x), y - x> >= 0`` on ``K`` plus a PSD test
    of the symmetrized Jacobian along the directions of ``K``."""
    rng = np.random.default_rng([seed, 7])
    X = K.sample(rng, samples, scale)
    Y = K.sample(rng, samples, scale)
    # pairs along the segment toward the first point catch flat directions
    D = Y - X
    vals = np.einsum("ij,ij->i", P.eval(Y) - P.eval(X), D)
    nrm = np.einsum("ij,ij->i", D, D)
    keep = nrm > 1e-20
    vals, X, Y, nrm = vals[keep], X[keep], Y[keep], nrm[keep]
    i = int(np.argmin(vals)) if len(vals) else None
    min_pair = float(vals[i]) if i is not None else np.inf
    if i is not None and min_pair < -tol * max(1.0, nrm[i]):
        return MonotonicityVerdict("not_monotone", (X[i], Y[i]), min_pair, np.nan, len(vals))
    # Jacobian test in the linear hull of K - K
    dirs = null_space(K.E, rcond=1e-9) if K.t else np.eye(K.n)
    min_eig, at = np.inf, None
    for x in X[: min(len(X), 200)]:
        J = P.jacobian(x)
        S = dirs.T @ (0.5 * (J + J.T)) @ dirs
        w, V = np.linalg.eigh(S)
        if w[0] < min_eig:
            min_eig, at = float(w[0]), (x, dirs @ V[:, 0])
    if min_eig < -1e-8 and at is not None:
        x, v = at
        for h in (1e-1, 1e-2, 1e-3):
            for y in (x + h * v, x - h * v):
                if K.contains(y, 0.0):
                    val = float((P.eval(y) - P.eval(x)) @ (y - x))
                    if val < -tol:
                        return MonotonicityVerdict("not_monotone", (x, y), val, min_eig, len(vals))
        return MonotonicityVerdict("inconclusive", None, min_pair, min_eig, len(vals))
    strict = bool(len(vals)) and bool(np.all(vals > 0.0))
    status = "strictly_monotone_numeric" if strict else "monotone_numeric"
    return MonotonicityVerdict(status, None, min_pair, min_eig, len(vals))


# existence certificate


@dataclass(frozen=True)
class ExistenceCertificate:
    zero_in_K: bool
    copositivity: CopositivityVerdict
    r0: R0Verdict
    p_in_int_sc_dual: bool | None  # None when the R0 verdict is inconclusive
    conclusion: str  # nonempty_bounded | no_certificate
    caveat: str = ""

    def to_json(self):
        return _jsonable({
            "conclusion": self.conclusion,
            "premises": {
                "zero_in_K": self.zero_in_K,
                "copositivity": self.copositivity.to_json(),
                "r0": self.r0.to_json(),
                "p_in_int_sc_dual": self.p_in_int_sc_dual,
            },
            "caveat": self.caveat,
        })


def existence_certificate(prob: VIProblem, cfg: SolveConfig | None = None,
                          budget=32) -> ExistenceCertificate:
    """Premises ``0 in K``, ``P`` copositive on ``K``, ``p in int(Sc*)``;
    all three verified means Sol(K, P + p) is nonempty and bounded."""
    cfg = SolveConfig() if cfg is None else cfg
    K, P, p = prob.K, prob.P, prob.p
    zero_in = K.contains(np.zeros(K.n), 1e-12)
    cop = copositivity_check(P, K, budget=budget, seed=cfg.seed)
    r0 = is_r0_pair(K, P, cfg)
    caveat = ""
    if r0.status == "r0":
        inside = True
    elif r0.status == "not_r0":
        inside = int_dual_membership(r0.sc_generators(K.n), p)
        caveat = "Sc is represented by sampled witnesses; undiscovered directions of Sc may exist"
    else:
        inside = None
        caveat = "R0 verdict inconclusive; membership in int(Sc*) not decided"
    ok = zero_in and cop.status == "copositive_numeric" and inside is True
    return ExistenceCertificate(zero_in, cop, r0, inside, "nonempty_bounded" if ok else "no_certificate", caveat)


# GUS


@dataclass(frozen=True)
class GUSProbe:
    status: str  # consistent_with_gus | violated
    p: np.ndarray | None = None
    solutions: np.ndarray | None = None
    reason: str = ""
    checked: int = 0

    def to_json(self):
        return _jsonable({
            "status": self.status, "p": self.p, "solutions": self.solutions,
            "reason": self.reason, "checked": self.checked,
        })


def gus_probe(K, P, p_samples, cfg: SolveConfig | None = None) -> GUSProbe:
    """Solve VI(K, P + p) for every sample; any count other than one
    isolated verified solution violates the GUS property."""
    cfg = SolveConfig() if cfg is None else cfg
    for k, p in enumerate(p_samples):
        S = solve(VIProblem(K, P, p), cfg)
        X = S.array()
        if S.components:
            return GUSProbe("violated", np.asarray(p, float), S.all_samples()[:5], "nonisolated", k + 1)
        if len(X) != 1:
            return GUSProbe("violated", np.asarray(p, float), X, f"{len(X)} solutions", k + 1)
    return GUSProbe("consistent_with_gus", checked=len(p_samples))
