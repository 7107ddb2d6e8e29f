"""Empirical behaviour of the solution maps p -> Sol(K, P + p) and
P -> Sol(K, P): sweeps, semicontinuity and boundedness probes, Hölder fits,
and Monte-Carlo genericity experiments."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import qmc

from .analysis import _jsonable, copositivity_check, existence_certificate, is_r0_pair
from .kkt import SolutionSet, SolveConfig, VIProblem, solve
from .polyhedra import PolyhedralSet
from .polymap import MonomialBasis, PolynomialMap

log = logging.getLogger(__name__)


class UndefinedExcess(ValueError):
    """Excess is undefined for sets with sampled positive-dimensional pieces."""


class PremiseError(ValueError):
    """The hypotheses required by a stability check are not verified."""


def _points(S) -> np.ndarray:
    if isinstance(S, SolutionSet):
        if S.components:
            raise UndefinedExcess("solution set has nonisolated components")
        return S.array()
    return np.asarray(S, dtype=float).reshape(-1, np.shape(S)[-1] if np.ndim(S) > 1 else 1)


def hausdorff_excess(Sq, Sp) -> float:
    """``max_{x in Sq} min_{y in Sp} |x - y|``; 0 when Sq is empty."""
    A, B = _points(Sq), _points(Sp)
    if len(A) == 0:
        return 0.0
    if len(B) == 0:
        return float("inf")
    return float(cdist(A, B).min(axis=1).max())


def hausdorff_distance(S1, S2) -> float:
    return max(hausdorff_excess(S1, S2), hausdorff_excess(S2, S1))


# sweeps


@dataclass(frozen=True)
class CellSummary:
    p: np.ndarray
    cardinality: int
    nonisolated: bool
    unbounded_suspected: bool
    status: str
    points: np.ndarray
    label: str
    max_norm: float

    def row(self):
        return [*self.p.tolist(), self.cardinality, int(self.nonisolated),
                int(self.unbounded_suspected), self.status, self.label, self.max_norm]


@dataclass(frozen=True)
class SweepResult:
    grid: np.ndarray
    cells: tuple
    seed: int
    config_hash: str

    def to_csv(self) -> str:
        n = self.grid.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"p{i + 1}" for i in range(n)] + ["cardinality", "nonisolated", "unbounded", "status", "label", "max_norm"])
        for c in self.cells:
            w.writerow([repr(v) if isinstance(v, float) else v for v in c.row()])
        return buf.getvalue()

    def to_json(self):
        return _jsonable({
            "seed": self.seed, "config_hash": self.config_hash,
            "cells": [{"p": c.p, "cardinality": c.cardinality, "nonisolated": c.nonisolated,
                       "unbounded": c.unbounded_suspected, "status": c.status, "label": c.label,
                       "points": c.points} for c in self.cells],
        })


def _label(S: SolutionSet) -> str:
    if S.components:
        return "nonisolated"
    k = len(S.points)
    return {0: "empty", 1: "single"}.get(k, f"finite:{k}")


def solution_map_sweep(K, P, p_grid, cfg: SolveConfig | None = None) -> SweepResult:
    """Solve VI(K, P + p) at every grid point; failures are recorded per cell."""
    cfg = SolveConfig() if cfg is None else cfg
    grid = np.atleast_2d(np.asarray(p_grid, dtype=float))
    cells = []
    for p in grid:
        try:
            S = solve(VIProblem(K, P, p), cfg)
        except Exception as exc:  # keep sweeping
            log.warning("sweep cell %s failed: %s", p, exc)
            cells.append(CellSummary(p, -1, False, False, "error", np.zeros((0, len(p))), f"error: {exc}", np.nan))
            continue
        X = S.all_samples()
        cells.append(CellSummary(
            p, len(S.points), S.nonisolated, S.unbounded_suspected, S.status, S.array(),
            _label(S), float(np.linalg.norm(X, axis=1).max()) if len(X) else 0.0,
        ))
    return SweepResult(grid, tuple(cells), cfg.seed, cfg.digest())


def grid_product(values, n):
    """Cartesian grid of ``values`` in every coordinate (last coordinate fastest)."""
    mesh = np.meshgrid(*([np.asarray(values, dtype=float)] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


# upper semicontinuity and local boundedness


def sphere_directions(n, k, seed=0) -> np.ndarray:
    """``k`` deterministic low-discrepancy unit vectors in R^n."""
    if n == 1:
        return np.array([[1.0], [-1.0]] * ((k + 1) // 2))[:k]
    if n == 2:
        off = np.random.default_rng([seed, 2]).random()
        th = 2 * np.pi * (np.arange(k) + off) / k
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    from scipy.stats import norm

    U = qmc.Sobol(d=n, scramble=True, seed=seed).random(k)
    G = norm.ppf(np.clip(U, 1e-12, 1 - 1e-12))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


@dataclass(frozen=True)
class USCProbe:
    status: str  # no_violation | violation | anchor_unbounded | anchor_nonisolated | inconclusive
    q: np.ndarray | None = None
    point: np.ndarray | None = None
    checked: int = 0
    excluded: int = 0

    def to_json(self):
        return _jsonable({"status": self.status, "q": self.q, "point": self.point,
                          "checked": self.checked, "excluded": self.excluded})


def usc_probe(K, P, p, radii, directions=16, eps=0.2, cfg: SolveConfig | None = None) -> USCProbe:
    """Look for solutions of nearby problems outside the eps-fattening of Sol(K, P + p)."""
    cfg = SolveConfig() if cfg is None else cfg
    p = np.asarray(p, dtype=float)
    S = solve(VIProblem(K, P, p), cfg)
    if S.unbounded_suspected:
        return USCProbe("anchor_unbounded")
    if S.components:
        return USCProbe("anchor_nonisolated")
    if S.status != "complete":
        return USCProbe("inconclusive")
    base = S.array()
    U = sphere_directions(len(p), directions, cfg.seed) if np.isscalar(directions) else np.asarray(directions, float)
    checked = excluded = 0
    for r in radii:
        for u in U:
            q = p + r * u
            Sq = solve(VIProblem(K, P, q), cfg)
            if Sq.status == "inconclusive":
                excluded += 1
                continue
            checked += 1
            X = Sq.all_samples()
            if not len(X):
                continue
            if len(base) == 0:
                return USCProbe("violation", q, X[0], checked, excluded)
            d = cdist(X, base).min(axis=1)
            j = int(np.argmax(d))
            if d[j] > eps:
                return USCProbe("violation", q, X[j], checked, excluded)
    return USCProbe("no_violation", None, None, checked, excluded)


@dataclass(frozen=True)
class BoundednessReport:
    eps: tuple
    sup_norms: tuple
    unbounded_flags: tuple
    perturbations: int

    @property
    def bounded(self) -> bool:
        return not any(self.unbounded_flags) and all(np.isfinite(self.sup_norms))

    @property
    def nonincreasing(self) -> bool:
        s = np.array(self.sup_norms)
        order = np.argsort(-np.array(self.eps))  # largest eps first
        return bool(np.all(np.diff(s[order]) <= 1e-9 * (1 + np.abs(s[order][:-1]))))

    def to_json(self):
        return _jsonable({"eps": list(self.eps), "sup_norms": list(self.sup_norms),
                          "unbounded_flags": list(self.unbounded_flags),
                          "bounded": self.bounded, "nonincreasing": self.nonincreasing,
                          "perturbations": self.perturbations})


def local_boundedness_probe(K, P, eps_list, cfg: SolveConfig | None = None, perturbations=20,
                            p=None, directions=None) -> BoundednessReport:
    """Sup of solution norms over coefficient perturbations ``|Q| < eps``.

    ``directions`` optionally fixes the perturbation matrices (scaled to
    Frobenius norm ``eps`` times a factor in (0, 1)); otherwise they are
    random Gaussian matrices.
    """
    cfg = SolveConfig() if cfg is None else cfg
    rng = np.random.default_rng([cfg.seed, 31337])
    base = VIProblem(K, P, p)
    sups, flags = [], []
    for eps in eps_list:
        sup, unb = 0.0, 0
        for k in range(perturbations):
            if directions is not None:
                D = np.asarray(directions[k % len(directions)], dtype=float)
            else:
                D = rng.normal(size=P.coeffs.shape)
            D = D / np.linalg.norm(D)
            scale = eps * (1.0 - rng.random() * 0.5) if directions is None else eps * 0.999
            Q = PolynomialMap(P.basis, P.coeffs + scale * D)
            S = solve(VIProblem(K, Q, base.p), cfg)
            X = S.all_samples()
            if len(X):
                sup = max(sup, float(np.linalg.norm(X, axis=1).max()))
            unb += int(S.unbounded_suspected)
        sups.append(sup)
        flags.append(unb)
    return BoundednessReport(tuple(eps_list), tuple(sups), tuple(flags), perturbations)


# Hölder fits


@dataclass(frozen=True)
class HoelderFit:
    anchor: np.ndarray
    radii: np.ndarray
    excesses: np.ndarray  # max excess per radius
    all_excesses: np.ndarray  # radii x directions
    L: float
    c: float
    residual: float
    dropped_zero: int
    degenerate: bool

    def to_json(self):
        return _jsonable({
            "anchor": self.anchor, "radii": self.radii, "excesses": self.excesses,
            "L": self.L, "c": self.c, "fit_residual": self.residual,
            "dropped_zero": self.dropped_zero, "degenerate": self.degenerate,
        })


def fit_power_law(radii, excesses):
    """Least squares of ``log e = log L + c log r`` over positive excesses.

    Returns ``(L, c, rms_residual, dropped, degenerate)``.
    """
    r = np.asarray(radii, dtype=float)
    e = np.asarray(excesses, dtype=float)
    pos = e > 0
    dropped = int((~pos).sum())
    if pos.sum() < 2:
        return np.nan, np.nan, np.nan, dropped, True
    lr, le = np.log(r[pos]), np.log(e[pos])
    c, logL = np.polyfit(lr, le, 1)
    resid = float(np.sqrt(np.mean((le - (logL + c * lr)) ** 2)))
    return float(np.exp(logL)), float(c), resid, dropped, False


def hoelder_fit(K, P, p, radii=(1e-1, 1e-2, 1e-3, 1e-4), samples_per_radius=16,
                cfg: SolveConfig | None = None) -> HoelderFit:
    """Fit ``e(Sol(q), Sol(p)) <= L |q - p|^c`` on spheres around ``p``.

    The same direction set is used at every radius, so the fit sees how one
    family of perturbations scales.
    """
    cfg = SolveConfig() if cfg is None else cfg
    p = np.asarray(p, dtype=float)
    Sp = solve(VIProblem(K, P, p), cfg)
    if Sp.components or Sp.status != "complete" or not Sp.points:
        raise PremiseError(f"anchor solution set must be nonempty, finite and complete (status {Sp.status})")
    U = sphere_directions(len(p), samples_per_radius, cfg.seed)
    radii = np.asarray(radii, dtype=float)
    E = np.full((len(radii), len(U)), np.nan)
    for i, r in enumerate(radii):
        for j, u in enumerate(U):
            Sq = solve(VIProblem(K, P, p + r * u), cfg)
            if Sq.status != "complete" or Sq.components:
                continue
            E[i, j] = hausdorff_excess(Sq, Sp)
    emax = np.nanmax(np.where(np.isnan(E), -np.inf, E), axis=1)
    emax[~np.isfinite(emax)] = np.nan
    ok = np.isfinite(emax)
    L, c, resid, dropped, degen = fit_power_law(radii[ok], emax[ok])
    return HoelderFit(p, radii, emax, E, L, c, resid, dropped, degen)


def perturbed_hoelder_check(K, P, p, Q, q, cfg: SolveConfig | None = None, fit: HoelderFit | None = None,
                            inflate=2.0) -> bool:
    """Check ``Sol(K, Q+q) ⊂ Sol(K, P+p) + 2L(|Q-P| + |q-p|)^c B``.

    Premises (0 in K, P and Q copositive, p in int(Sc*)) must verify, else
    :class:`PremiseError`. A degenerate fit (all excesses zero near ``p``)
    only admits inclusion up to the cluster radius.
    """
    cfg = SolveConfig() if cfg is None else cfg
    p, q = np.asarray(p, float), np.asarray(q, float)
    cert = existence_certificate(VIProblem(K, P, p), cfg)
    if cert.conclusion != "nonempty_bounded":
        raise PremiseError("premises fail for (K, P, p): " + ", ".join(
            name for name, ok in [("0 in K", cert.zero_in_K),
                                  ("P copositive", cert.copositivity.status == "copositive_numeric"),
                                  ("p in int(Sc*)", cert.p_in_int_sc_dual is True)] if not ok))
    if copositivity_check(Q, K, seed=cfg.seed).status != "copositive_numeric":
        raise PremiseError("Q is not (numerically) copositive on K")
    fit = hoelder_fit(K, P, p, cfg=cfg) if fit is None else fit
    Sp = solve(VIProblem(K, P, p), cfg)
    Sq = solve(VIProblem(K, Q, q), cfg)
    if Sq.components:
        return False
    e = hausdorff_excess(Sq, Sp)
    dist = (Q - P).frobenius_norm() + float(np.linalg.norm(q - p))
    if fit.degenerate:
        bound = 0.0
    else:
        bound = inflate * fit.L * dist ** fit.c
    ok = e <= bound + 10 * cfg.cluster_radius
    if not ok:
        log.warning("inclusion check failed: excess %.3g > bound %.3g (suspicious, not a refutation)", e, bound)
    return ok


# genericity


@dataclass(frozen=True)
class GenericityStats:
    n: int
    d: int
    mode: str
    trials: int
    seed: int
    finite: int
    r0: int
    inconclusive: int
    retried: int
    exceptional: tuple  # trial indices; re-run with trial_rng(seed, index)
    planted: tuple = ()
    distribution: str = "iid standard normal coefficients"

    def to_json(self):
        return _jsonable({
            "n": self.n, "d": self.d, "mode": self.mode, "trials": self.trials, "seed": self.seed,
            "distribution": self.distribution, "finite": self.finite, "r0": self.r0,
            "inconclusive": self.inconclusive, "retried": self.retried,
            "exceptional": list(self.exceptional), "planted": list(self.planted),
        })


def trial_rng(seed, index):
    return np.random.default_rng([seed, index, 2718])


def random_map(n, d, rng, homogeneous=False) -> PolynomialMap:
    basis = MonomialBasis(n, d)
    if homogeneous:
        sl = basis.degree_slice(d)
        return PolynomialMap.homogeneous(rng.normal(size=(n, sl.stop - sl.start)), d)
    return PolynomialMap(basis, rng.normal(size=(n, len(basis))))


def genericity_experiment(n, d, K: PolyhedralSet, trials, seed=0, mode="finite_valued",
                          cfg: SolveConfig | None = None, planted=()) -> GenericityStats:
    """Sample random maps and count finite-valued solution sets or R0 pairs.

    Inconclusive trials are re-run once with twice the multistart budget.
    ``planted`` maps are evaluated in the same mode and reported separately.
    """
    cfg = SolveConfig() if cfg is None else cfg
    if mode not in ("finite_valued", "r0"):
        raise ValueError(f"unknown mode {mode!r}")
    target = K if mode == "finite_valued" else K.recession_cone()
    if not target.licq_check():
        raise ValueError("LICQ must hold on " + ("K" if mode == "finite_valued" else "the recession cone of K"))

    def run(P, c):
        if mode == "finite_valued":
            S = solve(VIProblem(K, P), c)
            if S.status == "inconclusive":
                return "inconclusive"
            return "finite" if not S.components else "infinite"
        return is_r0_pair(K, P, c).status

    finite = r0 = inconclusive = retried = 0
    exceptional = []
    for i in range(trials):
        P = random_map(n, d, trial_rng(seed, i), homogeneous=(mode == "r0"))
        c = cfg.replace(seed=int(np.random.SeedSequence([seed, i]).generate_state(1)[0]))
        out = run(P, c)
        if out == "inconclusive":
            retried += 1
            out = run(P, c.replace(multistart=2 * c.multistart))
        if out == "finite":
            finite += 1
        elif out == "r0":
            r0 += 1
        elif out == "inconclusive":
            inconclusive += 1
            exceptional.append(i)
        else:
            exceptional.append(i)
    planted_out = tuple(run(P, cfg) for P in planted)
    return GenericityStats(n, d, mode, trials, seed, finite, r0, inconclusive, retried,
                           tuple(exceptional), planted_out)
