"""Solution sets of VI(K, P + p) by KKT enumeration over pseudo-faces.

On every nonempty pseudo-face ``alpha`` of ``K`` the solver looks for zeros of

    F(x) + C_alpha^T lam + E^T mu = 0,   C_alpha x = b_alpha,   E x = d

with ``lam >= 0`` and the remaining inequalities satisfied. Multistart
Gauss-Newton finds candidates, clustering removes duplicates, a rank/probe
test flags solution curves (which are then traced), and every reported
point is re-checked against the variational inequality with the LP oracle.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import least_squares
from scipy.spatial import cKDTree

from .polyhedra import PolyhedralCone, PolyhedralSet, PseudoFace
from .polymap import DimensionError, PolynomialMap

log = logging.getLogger(__name__)


class LICQError(ValueError):
    """LICQ fails on some pseudo-face, so KKT points need not be VI solutions."""


@dataclass(frozen=True)
class SolveConfig:
    newton_tol: float = 1e-10
    max_iter: int = 50
    multistart: int = 64
    seed_radius: float = 10.0
    cluster_radius: float = 1e-6
    verify_tol: float = 1e-8
    seed: int = 0
    component_step: float = 1e-2
    max_component_samples: int = 5000
    face_cap: int = 20
    threads: int = 1

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name == "seed":
                continue
            if not getattr(self, f.name) > 0:
                raise ValueError(f"SolveConfig.{f.name} must be positive")

    def replace(self, **changes) -> "SolveConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """Hash of the result-affecting fields (``threads`` excluded)."""
        fields = {k: v for k, v in self.to_json().items() if k != "threads"}
        blob = json.dumps(fields, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class VIProblem:
    """VI(K, P + p)."""

    K: PolyhedralSet
    P: PolynomialMap
    p: np.ndarray = None

    def __post_init__(self):
        p = np.zeros(self.P.n) if self.p is None else np.asarray(self.p, dtype=float).ravel()
        if p.shape != (self.P.n,) or self.K.n != self.P.n:
            raise DimensionError(f"K is in R^{self.K.n}, P maps R^{self.P.n}, p has shape {p.shape}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "F", self.P.shift(p))

    @property
    def n(self):
        return self.P.n

    def with_p(self, p) -> "VIProblem":
        return VIProblem(self.K, self.P, p)


class KKTSystem:
    """Square KKT residual of one pseudo-face, unknowns ``z = (x, lam, mu)``."""

    def __init__(self, prob: VIProblem, face: PseudoFace):
        K = prob.K
        self.prob = prob
        self.face = face
        self.F = prob.F
        idx = list(face.alpha)
        self.Ca, self.ba = K.C[idx], K.b[idx]
        rest = list(face.rest)
        self.Cr, self.br = K.C[rest], K.b[rest]
        self.E, self.d = K.E, K.dvec
        self.n, self.na, self.t = K.n, len(idx), K.t
        self.size = self.n + self.na + self.t
        N = self.size
        # constant part of the Jacobian
        J0 = np.zeros((N, N))
        n, na = self.n, self.na
        J0[:n, n:n + na] = self.Ca.T
        J0[:n, n + na:] = self.E.T
        J0[n:n + na, :n] = self.Ca
        J0[n + na:, :n] = self.E
        self._J0 = J0

    def split(self, z):
        z = np.asarray(z)
        n, na = self.n, self.na
        return z[..., :n], z[..., n:n + na], z[..., n + na:]

    def residual(self, Z):
        Z = np.atleast_2d(Z)
        X, L, M = self.split(Z)
        top = self.F.eval(X) + L @ self.Ca + M @ self.E
        return np.hstack([top, X @ self.Ca.T - self.ba, X @ self.E.T - self.d])

    def jacobian(self, Z):
        Z = np.atleast_2d(Z)
        J = np.broadcast_to(self._J0, (len(Z),) + self._J0.shape).copy()
        J[:, :self.n, :self.n] = self.F.jacobian(Z[:, :self.n])
        return J

    def feasible(self, Z, tol):
        """Sign and face conditions: ``lam >= -tol`` and ``C_rest x <= b_rest + tol``."""
        Z = np.atleast_2d(Z)
        X, L, _ = self.split(Z)
        ok = np.all(L >= -tol, axis=1)
        if len(self.Cr):
            ok &= np.all(X @ self.Cr.T <= self.br + tol, axis=1)
        return ok


def assemble_kkt(prob: VIProblem, face: PseudoFace, check_licq=True) -> KKTSystem:
    if check_licq:
        rows = np.vstack([prob.K.C[list(face.alpha)], prob.K.E])
        if len(rows) and np.linalg.matrix_rank(rows, tol=1e-9 * max(1.0, np.abs(rows).max())) < len(rows):
            raise LICQError(f"LICQ fails on pseudo-face {list(face.alpha)}")
    return KKTSystem(prob, face)


# Gauss-Newton

_HALVINGS = 0.5 ** np.arange(1, 41)


def newton_batch(sys, Z0, cfg: SolveConfig, max_iter=None):
    """Damped Gauss-Newton from every row of ``Z0``.

    Steps are minimum-norm least-squares solutions, so rank-deficient
    Jacobians (solution curves, singular roots) are handled. When successive
    steps shrink linearly at a steady rate ``rho`` the root is treated as
    having multiplicity ``1/(1-rho)`` and the step is scaled accordingly.

    Returns ``(Z, res)`` with ``res`` the sup-norm residual of each row.
    """
    Z = np.array(Z0, dtype=float, copy=True)
    max_iter = cfg.max_iter if max_iter is None else max_iter
    r = sys.residual(Z)
    nr = np.linalg.norm(r, axis=1)
    S = len(Z)
    active = np.isfinite(nr) & (nr > 0)
    prev_step = np.full(S, np.inf)
    prev_ratio = np.full(S, np.nan)
    mmax = 2 * max(sys.F.degree(), 1) + 2
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if not len(idx):
            break
        J = sys.jacobian(Z[idx])
        dz = -np.einsum("sij,sj->si", np.linalg.pinv(J, rcond=1e-13), r[idx])
        step = np.linalg.norm(dz, axis=1)

        # backtracking on the Euclidean residual
        t = np.ones(len(idx))
        Zt = Z[idx] + dz
        rt = sys.residual(Zt)
        nt = np.linalg.norm(rt, axis=1)
        bad = ~(nt <= nr[idx] * (1 - 1e-4)) & (nr[idx] > 0)
        stalled = np.zeros(len(idx), dtype=bool)
        if bad.any():
            # all step lengths 2^-1 .. 2^-40 in one batched residual call
            b = np.flatnonzero(bad)
            nb, N = len(b), Z.shape[1]
            Zc = Z[idx[b]][:, None, :] + _HALVINGS[None, :, None] * dz[b][:, None, :]
            rc = sys.residual(Zc.reshape(-1, N)).reshape(nb, len(_HALVINGS), -1)
            nc = np.linalg.norm(rc, axis=2)
            okm = nc <= nr[idx[b]][:, None] * (1 - 1e-4 * _HALVINGS[None, :])
            has = okm.any(axis=1)
            first = np.argmax(okm, axis=1)
            rows = np.arange(nb)
            t[b] = np.where(has, _HALVINGS[first], 0.0)
            Zt[b] = Zc[rows, first]
            rt[b] = rc[rows, first]
            nt[b] = nc[rows, first]
            stalled[b] = ~has

        # multiplicity acceleration
        ratio = step / prev_step[idx]
        steady = (t == 1.0) & (ratio > 0.3) & (ratio < 0.95) & (np.abs(ratio - prev_ratio[idx]) < 0.05)
        if steady.any():
            m = np.clip(np.rint(1.0 / (1.0 - ratio[steady])), 2, mmax)
            Zm = Z[idx][steady] + m[:, None] * dz[steady]
            rm = sys.residual(Zm)
            nm = np.linalg.norm(rm, axis=1)
            better = nm < nt[steady]
            sel = np.flatnonzero(steady)[better]
            Zt[sel], rt[sel], nt[sel] = Zm[better], rm[better], nm[better]

        Z[idx[~stalled]] = Zt[~stalled]
        r[idx[~stalled]] = rt[~stalled]
        nr[idx[~stalled]] = nt[~stalled]
        prev_ratio[idx] = ratio
        prev_step[idx] = step
        scale = 1.0 + np.linalg.norm(Z[idx], axis=1)
        done = stalled | (t * step <= 1e-15 * scale) | (nr[idx] == 0) | ~np.isfinite(nr[idx])
        active[idx[done]] = False
    res = np.max(np.abs(r), axis=1) if r.shape[1] else np.zeros(S)
    res[~np.isfinite(res)] = np.inf
    return Z, res


# results


@dataclass(frozen=True)
class SolutionPoint:
    x: np.ndarray
    face: tuple
    residual: float
    lam: np.ndarray
    mu: np.ndarray

    def to_json(self):
        return {
            "x": self.x.tolist(),
            "face": list(self.face),
            "residual": self.residual,
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
        }


@dataclass(frozen=True)
class Component:
    """Suspected positive-dimensional piece of the solution set."""

    face: tuple
    samples: np.ndarray
    tangent: np.ndarray
    reaches_box: bool

    @property
    def dim(self):
        return self.tangent.shape[1]

    def to_json(self):
        return {
            "face": list(self.face),
            "dim": self.dim,
            "reaches_box": self.reaches_box,
            "tangent": self.tangent.T.tolist(),
            "samples": self.samples.tolist(),
        }


@dataclass(frozen=True)
class SolutionSet:
    points: tuple
    components: tuple
    status: str  # complete | capped | inconclusive
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def nonisolated(self) -> bool:
        return bool(self.components)

    @property
    def is_finite(self) -> bool:
        return self.status == "complete" and not self.components

    @property
    def unbounded_suspected(self) -> bool:
        return any(c.reaches_box for c in self.components)

    def array(self) -> np.ndarray:
        n = self.diagnostics.get("n", 0)
        if not self.points:
            return np.zeros((0, n))
        return np.array([pt.x for pt in self.points])

    def all_samples(self) -> np.ndarray:
        """Isolated points stacked with every component sample."""
        parts = [self.array()] + [c.samples for c in self.components]
        return np.vstack(parts) if parts else np.zeros((0, 0))

    def to_json(self):
        return {
            "status": self.status,
            "points": [pt.to_json() for pt in self.points],
            "components": [c.to_json() for c in self.components],
            "diagnostics": self.diagnostics,
        }


# per-face solving


@dataclass
class FaceSolve:
    face: tuple
    candidates: list  # list of (z, residual)
    components: list
    near_miss: int = 0
    capped: bool = False


def _cluster(Zs, res, n, radius):
    """Greedy clustering on the x-part; representatives are residual-best."""
    order = np.lexsort(tuple(Zs[:, j] for j in range(Zs.shape[1] - 1, -1, -1)) + (res,))
    reps, members = [], []
    for i in order:
        x = Zs[i, :n]
        for k, j in enumerate(reps):
            if np.linalg.norm(Zs[j, :n] - x) <= radius:
                members[k].append(i)
                break
        else:
            reps.append(i)
            members.append([i])
    return reps, members


@dataclass(frozen=True)
class NonIsolation:
    flag: bool
    dim: int = 0
    tangent: np.ndarray = None  # N x dim, in z-space
    singular: bool = False


def detect_nonisolated(sys, z, cluster_count, cfg: SolveConfig, rng=None) -> NonIsolation:
    """Flag ``z`` as lying on a positive-dimensional solution piece.

    The KKT Jacobian is tested for rank deficiency; a deficient point is then
    probed by projecting small perturbations back onto the zero set. If the
    projections spread out the point sits on a curve/surface, whose tangent
    space is estimated from the spread. Isolated singular roots project back
    onto themselves and are not flagged. A face with more than a quarter of
    the multistart budget in distinct clusters is flagged regardless.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    J = sys.jacobian(z)[0]
    sv = np.linalg.svd(J, compute_uv=False) if J.size else np.zeros(0)
    deficient = bool(len(sv)) and (sv[0] <= 1e-14 or sv[-1] < 1e-7 * sv[0])
    too_many = cluster_count > cfg.multistart / 4
    if not deficient and not too_many:
        return NonIsolation(False)
    N = sys.size
    h = 1e-3 * max(1.0, float(np.linalg.norm(z[:sys.n])))
    U = rng.normal(size=(4 * N, N))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    Zp, res = newton_batch(sys, z + h * U, cfg)
    D = Zp[res <= cfg.newton_tol] - z
    if len(D) and np.max(np.linalg.norm(D, axis=1)) > 0.05 * h:
        _, s, Vt = np.linalg.svd(D, full_matrices=False)
        dim = max(1, int(np.sum(s > 0.1 * s[0])))
        return NonIsolation(True, dim, Vt[:dim].T, deficient)
    if too_many:
        return NonIsolation(True, 0, np.zeros((N, 0)), deficient)
    return NonIsolation(False, singular=True)


def _trace_curve(sys, z0, t0, cfg: SolveConfig, known=None):
    """March along a 1-dimensional zero set in both directions.

    Predictor step of length ``cfg.component_step`` along the secant
    direction, Gauss-Newton corrector. Stops at the face boundary, on leaving
    the seed box, on closing a loop, on running into an already traced piece
    (``known``, a KD-tree over x-samples), or at the sample cap. Starting
    points outside the seed box may walk inward.

    Returns ``(samples, reaches_box, capped, hit)`` where ``hit`` is the index
    into ``known`` of the first sample run into, else None.
    """
    h = cfg.component_step
    R = cfg.seed_radius
    n = sys.n
    samples = [z0]
    reaches_box = False
    capped = False
    hit = None
    budget = cfg.max_component_samples // 2
    for sgn in (1.0, -1.0):
        z, t = z0, sgn * t0
        for k in range(budget):
            zn, res = newton_batch(sys, (z + h * t)[None], cfg, max_iter=20)
            zn = zn[0]
            if res[0] > cfg.newton_tol or not sys.feasible(zn, cfg.verify_tol)[0]:
                break
            out_now = np.max(np.abs(zn[:n]))
            if out_now > R and out_now >= np.max(np.abs(z[:n])):
                reaches_box = True
                break
            step = zn - z
            ns = np.linalg.norm(step)
            if ns < 0.1 * h:
                break
            if known is not None:
                dist, j = known.query(zn[:n])
                if dist <= 0.5 * h:
                    hit = int(j) if hit is None else hit
                    break
            samples.append(zn)
            if k > 2 and np.linalg.norm(zn - z0) < 0.5 * h:
                return np.array(samples), reaches_box, capped, hit
            t = step / ns
            z = zn
        else:
            capped = True
    return np.array(samples), reaches_box, capped, hit


def _sample_manifold(sys, z0, T, cfg: SolveConfig, rng):
    R = cfg.seed_radius
    k = T.shape[1]
    C = rng.uniform(-R, R, size=(64 * k, k))
    Zp, res = newton_batch(sys, z0 + C @ T.T, cfg)
    keep = (res <= cfg.newton_tol) & sys.feasible(Zp, cfg.verify_tol)
    Zp = Zp[keep]
    Zp = Zp[np.max(np.abs(Zp[:, :sys.n]), axis=1) <= R] if len(Zp) else Zp
    samples = np.vstack([z0[None], Zp])
    reaches = bool(len(Zp)) and np.max(np.abs(Zp[:, :sys.n])) > 0.9 * R
    return samples, reaches


def _x_tangent(T, n):
    X = T[:n]
    if X.size == 0:
        return np.zeros((n, 0))
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    keep = s > 1e-8 * max(s[0], 1e-300)
    U = U[:, keep]
    # deterministic sign
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
    return U


def solve_face(sys: KKTSystem, cfg: SolveConfig, face_index=0) -> FaceSolve:
    """Multistart Gauss-Newton on one pseudo-face."""
    rng = np.random.default_rng([cfg.seed, face_index])
    S, n, N = cfg.multistart, sys.n, sys.size
    R = cfg.seed_radius
    Z0 = np.empty((S, N))
    Z0[:, :n] = rng.uniform(-R, R, size=(S, n))
    Z0[:, n:] = rng.normal(scale=R, size=(S, N - n))
    Z, res = newton_batch(sys, Z0, cfg)
    conv = res <= cfg.newton_tol
    feas = sys.feasible(Z, cfg.verify_tol)
    good = conv & feas
    near = (~conv) & (res <= 1e-6) & feas
    out = FaceSolve(sys.face.alpha, [], [])
    if not good.any():
        out.near_miss = int(near.sum())
        return out
    Zg, rg = Z[good], res[good]
    reps, members = _cluster(Zg, rg, n, cfg.cluster_radius)
    if near.any():
        # slow convergers next to an accepted root are duplicates, not misses
        tree = cKDTree(Zg[:, :n])
        dist, _ = tree.query(Z[near][:, :n])
        out.near_miss = int(np.sum(dist > 1e-3))

    comps = []  # [samples_z, tangent_z, reaches_box]
    owner = []  # component index of every x-sample in the KD-tree
    comp_tree = None
    probe_rng = np.random.default_rng([cfg.seed, face_index, 1])
    # reps inside the seed box first so outside ones can merge into them
    reps.sort(key=lambda i: bool(np.max(np.abs(Zg[i, :n])) > R))
    for rep in reps:
        z = Zg[rep]
        if comp_tree is not None:
            dist, _ = comp_tree.query(z[:n])
            if dist <= 2 * cfg.component_step:
                continue
        flag = detect_nonisolated(sys, z, len(reps), cfg, probe_rng)
        if not flag.flag:
            out.candidates.append((z, float(rg[rep])))
            continue
        target = None
        if flag.dim == 1:
            samples, reaches, capped, hit = _trace_curve(sys, z, flag.tangent[:, 0], cfg, comp_tree)
            out.capped |= capped
            if hit is not None:
                target = owner[hit]
            T = flag.tangent
        elif flag.dim >= 2:
            samples, reaches = _sample_manifold(sys, z, flag.tangent, cfg, probe_rng)
            T = flag.tangent
        else:
            samples = Zg[list(reps)]
            reaches = bool(np.max(np.abs(samples[:, :n])) > 0.9 * R)
            _, _, Vt = np.linalg.svd(samples - samples.mean(axis=0), full_matrices=False)
            T = Vt[:1].T
        inside = np.max(np.abs(samples[:, :n]), axis=1) <= R
        samples = samples[inside]
        if target is not None:
            comps[target][0] = np.vstack([comps[target][0], samples])
            comps[target][2] |= reaches
            owner.extend([target] * len(samples))
        elif len(samples):
            comps.append([samples, T, reaches or not inside.all()])
            owner.extend([len(comps) - 1] * len(samples))
        else:
            continue
        comp_tree = cKDTree(np.vstack([c[0][:, :n] for c in comps]))
    out.components = [tuple(c) for c in comps]
    return out


# verification


def verify_solution(prob: VIProblem, x, tol=1e-8) -> bool:
    """``x in K`` and ``min_{y in K} <F(x), y> >= <F(x), x> - tol``."""
    x = np.asarray(x, dtype=float)
    if not prob.K.contains(x, tol):
        return False
    Fx = prob.F.eval(x)
    lp = prob.K.lp_minimize(Fx, tol=tol)
    return lp.bounded and lp.value >= float(Fx @ x) - tol


def _dedupe_points(points, radius):
    kept = []
    for pt in sorted(points, key=lambda p: p.residual):
        if all(np.linalg.norm(pt.x - q.x) > radius for q in kept):
            kept.append(pt)
    kept.sort(key=lambda p: (p.face, tuple(np.round(p.x, 12))))
    return kept


def solve(prob: VIProblem, cfg: SolveConfig | None = None) -> SolutionSet:
    """All solutions of VI(K, P + p) found by KKT enumeration, verified."""
    cfg = SolveConfig() if cfg is None else cfg
    K = prob.K
    faces = K.pseudo_faces(cap=cfg.face_cap)
    licq = K.licq_check()
    if not licq:
        raise LICQError(f"LICQ fails on pseudo-face {list(licq.face.alpha)}")
    systems = [assemble_kkt(prob, f, check_licq=False) for f in faces]

    def run(i):
        return solve_face(systems[i], cfg, i)

    if cfg.threads > 1 and len(systems) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            results = list(ex.map(run, range(len(systems))))
    else:
        results = [run(i) for i in range(len(systems))]

    n = prob.n
    points, comps = [], []
    rejected = 0
    near_miss = sum(r.near_miss for r in results)
    capped = any(r.capped for r in results)
    for sys, fr in zip(systems, results):
        for z, res in fr.candidates:
            x, lam, mu = sys.split(z)
            if verify_solution(prob, x, cfg.verify_tol):
                points.append(SolutionPoint(x.copy(), fr.face, res, lam.copy(), mu.copy()))
            else:
                rejected += 1
        for samples, T, reaches in fr.components:
            X = samples[:, :n]
            ok = np.array([verify_solution(prob, x, cfg.verify_tol) for x in X])
            rejected += int((~ok).sum())
            if ok.sum() == 0:
                continue
            X = X[ok]
            order = np.lexsort(X.T[::-1])
            comps.append(Component(fr.face, X[order], _x_tangent(T, n), reaches))
    points = _dedupe_points(points, cfg.cluster_radius)
    comps.sort(key=lambda c: (c.face, tuple(np.round(c.samples[0], 12))))
    if rejected or near_miss:
        status = "inconclusive"
    elif capped:
        status = "capped"
    else:
        status = "complete"
    diag = {
        "n": n,
        "faces": len(faces),
        "rejected": rejected,
        "near_miss": near_miss,
        "seed": cfg.seed,
        "config_hash": cfg.digest(),
    }
    return SolutionSet(tuple(points), tuple(comps), status, diag)


# complementarity on cones


@dataclass(frozen=True)
class ConeCPResult:
    status: str  # trivial | nontrivial | inconclusive
    witnesses: tuple
    min_merit: float
    face_minima: dict = field(default_factory=dict, compare=False)
    starts: int = 0

    @property
    def witness(self):
        return self.witnesses[0] if self.witnesses else None


def cp_conditions(C: PolyhedralCone, H: PolynomialMap, x, tol=1e-8) -> bool:
    """``x in C``, ``H(x) in C*`` and ``<H(x), x> = 0``, each to ``tol``."""
    x = np.asarray(x, dtype=float)
    if not C.contains(x, tol):
        return False
    Hx = H.eval(x)
    gens = C.generators()
    if any(abs(float(Hx @ l)) > tol for l in gens.lineality):
        return False
    if any(float(Hx @ r) < -tol for r in gens.rays):
        return False
    return abs(float(Hx @ x)) <= tol


NONTRIVIAL_MERIT = 1e-12
TRIVIAL_MERIT = 1e-6


def _cone_face_merit(H, C, face, basis, starts, cfg):
    """Multistart least squares for unit-norm CP solutions on one face."""
    alpha = list(face.alpha)
    rest = list(face.rest)
    Ca, Cr, E = C.C[alpha], C.C[rest], C.E
    n, k, na, t = C.n, basis.shape[1], len(alpha), C.t

    def unpack(w):
        return w[:k], w[k:k + na], w[k + na:]

    def fun(w):
        u, lam, mu = unpack(w)
        nu = np.linalg.norm(u)
        x = basis @ (u / nu)
        r1 = H.eval(x) + Ca.T @ lam + E.T @ mu
        r2 = np.maximum(Cr @ x, 0.0)
        return np.concatenate([r1, r2, [nu - 1.0]])

    def jac(w):
        u, lam, mu = unpack(w)
        nu = np.linalg.norm(u)
        uh = u / nu
        x = basis @ uh
        dx = basis @ ((np.eye(k) - np.outer(uh, uh)) / nu)
        J = np.zeros((n + len(rest) + 1, len(w)))
        J[:n, :k] = H.jacobian(x) @ dx
        J[:n, k:k + na] = Ca.T
        J[:n, k + na:] = E.T
        act = (Cr @ x) > 0
        J[n:n + len(rest), :k] = (Cr * act[:, None]) @ dx
        J[-1, :k] = uh
        return J

    lo = np.concatenate([np.full(k, -np.inf), np.zeros(na), np.full(t, -np.inf)])
    hi = np.full(k + na + t, np.inf)
    rng = np.random.default_rng([cfg.seed, 7919, len(alpha)] + alpha)
    results = []
    for _ in range(starts):
        u0 = rng.normal(size=k)
        u0 /= np.linalg.norm(u0)
        w0 = np.concatenate([u0, np.abs(rng.normal(size=na)), rng.normal(size=t)])
        sol = least_squares(fun, w0, jac=jac, bounds=(lo, hi), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100 * (k + na + t + 1))
        r = sol.fun[:-1]
        merit = float(r @ r)
        u, _, _ = unpack(sol.x)
        results.append((merit, basis @ (u / np.linalg.norm(u))))
    return results


def solve_cone_cp(C: PolyhedralCone, H: PolynomialMap, cfg: SolveConfig | None = None,
                  starts: int | None = None) -> ConeCPResult:
    """Search for unit-norm solutions of CP(C, H) with ``H`` homogeneous.

    ``trivial`` means every face-wise merit minimum stayed above 1e-6 after
    the full multistart budget; it is numerical evidence, not a proof.
    """
    cfg = SolveConfig() if cfg is None else cfg
    starts = max(8, cfg.multistart // 4) if starts is None else starts
    if not H.is_zero() and not H.is_homogeneous():
        raise ValueError("solve_cone_cp needs a homogeneous map")
    if C.is_trivial():
        return ConeCPResult("trivial", (), np.inf, {}, 0)
    if H.is_zero():
        # every unit vector of C solves CP(C, 0)
        gens = C.generators()
        w = gens.rays[0] if len(gens.rays) else gens.lineality[0]
        return ConeCPResult("nontrivial", (w.copy(),), 0.0, {}, 0)
    face_min = {}
    witnesses = []
    total = 0
    for face in C.pseudo_faces(cap=cfg.face_cap):
        rows = np.vstack([C.C[list(face.alpha)], C.E])
        basis = null_space(rows, rcond=1e-9) if len(rows) else np.eye(C.n)
        if basis.shape[1] == 0:
            continue
        res = _cone_face_merit(H, C, face, basis, starts, cfg)
        total += len(res)
        face_min[tuple(face.alpha)] = min(m for m, _ in res)
        for merit, x in res:
            if merit < NONTRIVIAL_MERIT and cp_conditions(C, H, x, 1e-8):
                if all(np.linalg.norm(x - w) > 1e-6 for w in witnesses):
                    witnesses.append(x)
    min_merit = min(face_min.values()) if face_min else np.inf
    if witnesses:
        witnesses.sort(key=lambda w: tuple(np.round(-w, 10)))
        return ConeCPResult("nontrivial", tuple(witnesses), min_merit, face_min, total)
    if min_merit > TRIVIAL_MERIT:
        return ConeCPResult("trivial", (), min_merit, face_min, total)
    return ConeCPResult("inconclusive", (), min_merit, face_min, total)
