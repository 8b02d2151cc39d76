"""Per-slot transmit covariance design.

The sum-rate problem over Hermitian PSD matrices W_k is handled in two stages:
successive convex approximation (SCA) of the interference terms, then
iterative rank minimisation (IRM) to push each W_k to rank one.

Every constraint and objective term touches W_k only through quadratic forms
x^H W_k x with x drawn from a small set (the predicted channels and the
steering vectors of object k's coverage grid). Writing
W_k = U_k Y_k U_k^H + s_k (I - U_k U_k^H), with U_k an orthonormal basis of
that set, is therefore lossless, and the semidefinite blocks shrink from
N_t x N_t to rank(U_k) x rank(U_k). The solution is always reported as full
N_t x N_t matrices.

Internally power is normalised by P_T and channels by sigma_C / sqrt(P_T), so
the solver sees a unit power budget and unit noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import conic
from .phy import ArrayGeometry, channel_vector, omni_covariance, steering_vector

LN2 = math.log(2.0)


class SolverFailure(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InfeasibleProblem(SolverFailure):
    pass


class NearRankOneFailure(RuntimeError):
    def __init__(self, message, solution, ratio):
        super().__init__(message)
        self.solution = solution
        self.ratio = ratio


# ---------------------------------------------------------------------------
# problem data


def build_coverage_grid(theta_bar: float, sigma_theta: float, l: float, resolution: float
                        ) -> np.ndarray:
    """Angles within max(l*sigma, resolution) of theta_bar, spaced by ``resolution``."""
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    half = max(l * sigma_theta, resolution)
    n = int(math.floor(half / resolution + 1e-9))
    offsets = resolution * np.arange(-n, n + 1)
    if half - n * resolution > 1e-9 * resolution:
        offsets = np.concatenate([[-half], offsets, [half]])
    return theta_bar + offsets


@dataclass(frozen=True)
class BeamProblem:
    channels: np.ndarray  # (K, N_t) predicted channels
    theta_bar: np.ndarray  # (K,)
    sigma_theta: np.ndarray  # (K,) pointing std for the coverage constraint
    P_T: float
    sigma_c2: float
    gamma: np.ndarray  # (K,) rate floors, bit/s/Hz
    B: np.ndarray  # (K,) coverage slack
    l: float
    resolution: float
    geom: ArrayGeometry
    coverage: bool = True  # False keeps only the grid centre, which makes the constraint vacuous

    def __post_init__(self):
        if not self.P_T > 0 or not self.resolution > 0:
            raise ValueError("P_T and resolution must be positive")
        if np.any(np.asarray(self.gamma) < 0) or np.any(np.asarray(self.B) <= 0):
            raise ValueError("rate floors must be >= 0 and coverage slacks > 0")

    @property
    def K(self) -> int:
        return len(self.channels)

    @property
    def N(self) -> int:
        return self.geom.N_t

    def grid(self, k: int) -> np.ndarray:
        if not self.coverage:
            return np.array([self.theta_bar[k]])
        return build_coverage_grid(self.theta_bar[k], self.sigma_theta[k], self.l, self.resolution)

    @classmethod
    def from_predictions(cls, theta_bar, d_bar, sigma_theta, config, geom=None) -> "BeamProblem":
        geom = geom or ArrayGeometry.from_config(config)
        theta_bar = np.asarray(theta_bar, float)
        K = len(theta_bar)
        channels = np.array([channel_vector(t, d, geom, config.alpha0)
                             for t, d in zip(theta_bar, d_bar)])
        return cls(channels, theta_bar, np.asarray(sigma_theta, float), config.P_T,
                   config.sigma_c2, np.full(K, config.gamma_min), np.full(K, config.B),
                   config.l, config.resolution, geom)


# ---------------------------------------------------------------------------
# rates and the SCA surrogate (physical units)


def _forms(W: np.ndarray, channels: np.ndarray) -> np.ndarray:
    """F[k, i] = h_k^H W_i h_k."""
    return np.einsum("kn,inm,km->ki", channels.conj(), W, channels).real


def true_rates(W: np.ndarray, channels: np.ndarray, sigma_c2: float) -> np.ndarray:
    F = _forms(W, channels)
    total = F.sum(axis=1)
    interference = total - np.diag(F)
    return np.log2(total + sigma_c2) - np.log2(interference + sigma_c2)


@dataclass(frozen=True)
class SurrogateExpansion:
    W_q: np.ndarray  # (K, N, N) expansion point
    X: np.ndarray  # (K, N, N) linearisation matrices
    interference_q: np.ndarray  # (K,) sum_{i!=k} h_k^H W_i^q h_k


def make_expansion(W_q: np.ndarray, channels: np.ndarray, sigma_c2: float) -> SurrogateExpansion:
    W_q = np.asarray(W_q)
    F = _forms(W_q, channels)
    interference = F.sum(axis=1) - np.diag(F)
    outer = np.einsum("kn,km->knm", channels, channels.conj())
    X = outer / (LN2 * (interference + sigma_c2))[:, None, None]
    return SurrogateExpansion(W_q, X, interference)


def surrogate_rate(W: np.ndarray, expansion: SurrogateExpansion, k: int, channels: np.ndarray,
                   sigma_c2: float) -> float:
    h = channels[k]
    forms = np.einsum("n,inm,m->i", h.conj(), W, h).real
    others = [i for i in range(len(W)) if i != k]
    linear = sum(np.trace(expansion.X[k] @ (W[i] - expansion.W_q[i])).real for i in others)
    return float(np.log2(forms.sum() + sigma_c2)
                 - np.log2(expansion.interference_q[k] + sigma_c2) - linear)


def surrogate_rates(W, expansion, channels, sigma_c2) -> np.ndarray:
    return np.array([surrogate_rate(W, expansion, k, channels, sigma_c2)
                     for k in range(len(channels))])


# ---------------------------------------------------------------------------
# reduced parametrisation


class _Subspace:
    """Per-object basis U_k and the quadratic-form coefficients in reduced coordinates."""

    def __init__(self, problem: BeamProblem, rank_tol: float = 1e-9):
        self.N = problem.N
        self.g = problem.channels * math.sqrt(problem.P_T / problem.sigma_c2)
        self.U, self.r, self.grids = [], [], []
        self.chan = []  # chan[k][i] = (coef over y_k, coef over s_k) for g_i^H W_k g_i
        self.cov = []  # (coefs over y_k for each grid angle, coefs over s_k, centre index)
        unit = self.g / np.linalg.norm(self.g, axis=1, keepdims=True)
        for k in range(problem.K):
            grid = problem.grid(k)
            A = steering_vector(grid, problem.geom)
            S = np.concatenate([unit, A / math.sqrt(self.N)]).T
            u, sv, _ = np.linalg.svd(S, full_matrices=False)
            U = u[:, : int(np.sum(sv > rank_tol * sv[0]))]
            self.U.append(U)
            self.r.append(U.shape[1])
            self.grids.append(grid)
            self.chan.append([self._coeffs(U, self.g[i]) for i in range(problem.K)])
            cy, cs = self._coeffs(U, A)
            centre = int(np.argmin(np.abs(grid - problem.theta_bar[k])))
            self.cov.append((cy, cs, centre))

    @staticmethod
    def _coeffs(U, x):
        # a 1-D x gives one form; a 2-D x always gives one row per form
        single = np.ndim(x) == 1
        x = np.atleast_2d(x)
        c = x @ U.conj()  # rows are U^H x
        outside = np.sum(np.abs(x) ** 2, axis=1) - np.sum(np.abs(c) ** 2, axis=1)
        cy = conic.quad_coeffs(c)
        return (cy[0], outside[0]) if single else (cy, outside)

    def has_complement(self, k) -> bool:
        return self.r[k] < self.N

    def full(self, k, Y, s) -> np.ndarray:
        U = self.U[k]
        W = U @ Y @ U.conj().T
        if self.has_complement(k):
            W = W + s * (np.eye(self.N) - U @ U.conj().T)
        return W

    def reduce(self, k, W) -> tuple[np.ndarray, float]:
        U = self.U[k]
        Y = U.conj().T @ W @ U
        s = 0.0
        if self.has_complement(k):
            s = max((np.trace(W).real - np.trace(Y).real) / (self.N - self.r[k]), 0.0)
        return 0.5 * (Y + Y.conj().T), s


@dataclass
class _IrmSpec:
    bases: list  # per k: (Vt (r x m) basis inside U-space, complement_in_V: bool)
    weight: float
    r_cap: float | None  # upper bound on the normalised slack, None for no bound


def _irm_bases(sub: _Subspace, Wn: np.ndarray) -> list:
    """Eigen-structure of the previous iterate: the complement of its principal direction."""
    bases = []
    for k in range(len(Wn)):
        Y, s = sub.reduce(k, Wn[k])
        lam, vec = np.linalg.eigh(Y)
        if not sub.has_complement(k) or lam[-1] >= s:
            # principal eigenvector lies in span(U_k)
            bases.append((vec[:, :-1], sub.has_complement(k)))
        else:
            bases.append((vec, sub.N - sub.r[k] >= 2))
    return bases


@dataclass
class SubproblemResult:
    W: np.ndarray | None
    status: str
    objective: float = float("nan")  # surrogate sum rate (bits) at the returned point
    r: float = float("nan")  # IRM slack in physical power units
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    raw_status: str = ""


def _solve(problem: BeamProblem, sub: _Subspace, expansion: SurrogateExpansion,
           irm: _IrmSpec | None = None, tol: float = 1e-9) -> SubproblemResult:
    K, N = problem.K, problem.N
    scale = problem.P_T / problem.sigma_c2
    # interference at the expansion point, normalised units
    Iq = expansion.interference_q / problem.sigma_c2
    Lq = _forms(np.asarray(expansion.W_q), problem.channels) * (1.0 / problem.sigma_c2)

    prog = conic.ConicProgram()
    Y = [prog.hermitian(sub.r[k]) for k in range(K)]
    s = [prog.scalar() if sub.has_complement(k) else None for k in range(K)]
    t = [prog.scalar() for _ in range(K)]
    r_idx = prog.scalar() if irm is not None else None

    def form_row(k, i):
        """Row for g_k^H W_i g_k."""
        row = prog.zeros()
        cy, cs = sub.chan[i][k]
        row[Y[i].slice] = cy
        if s[i] is not None:
            row[s[i]] = cs
        return row

    def trace_row(k):
        row = prog.zeros()
        row[Y[k].slice] = conic.hermitian_coeffs(np.eye(sub.r[k]))
        if s[k] is not None:
            row[s[k]] = N - sub.r[k]
        return row

    # surrogate R~_k = t_k/ln2 + lin_k @ x + const_k
    sur_rows, sur_const = [], []
    objective = prog.zeros()
    for k in range(K):
        rows = [form_row(k, i) for i in range(K)]
        prog.log_epigraph(t[k], sum(rows), 1.0)
        lin = prog.zeros()
        lin[t[k]] = 1.0 / LN2
        const = -math.log2(1.0 + Iq[k])
        for i in range(K):
            if i != k:
                lin -= rows[i] / ((1.0 + Iq[k]) * LN2)
                const += Lq[k, i] / ((1.0 + Iq[k]) * LN2)
        sur_rows.append(lin)
        sur_const.append(const)
        objective -= lin

    # a 0.1% tighter slack absorbs interior-point residue in the returned point
    b_inner = np.asarray(problem.B, float) * (1.0 - 1e-3)
    power = -sum(trace_row(k) for k in range(K))
    prog.nonneg(power, 1.0)
    for k in range(K):
        prog.psd(Y[k])
        if s[k] is not None:
            unit = prog.zeros()
            unit[s[k]] = 1.0
            prog.nonneg(unit)
        if problem.gamma[k] > 0:
            prog.nonneg(sur_rows[k], sur_const[k] - problem.gamma[k])
        cy, cs, centre = sub.cov[k]
        tr = trace_row(k)
        for c in range(len(cy)):
            if c == centre:
                continue
            diff = prog.zeros()
            diff[Y[k].slice] = cy[centre] - cy[c]
            if s[k] is not None:
                diff[s[k]] = cs[centre] - cs[c]
            prog.nonneg(b_inner[k] * tr - diff)
            prog.nonneg(b_inner[k] * tr + diff)

    if irm is not None:
        unit = prog.zeros()
        unit[r_idx] = 1.0
        prog.nonneg(unit)
        if irm.r_cap is not None:
            prog.nonneg(-unit, irm.r_cap)
        objective[r_idx] += irm.weight
        for k, (Vt, complement) in enumerate(irm.bases):
            m = Vt.shape[1]
            if m:
                images = -np.einsum("ia,mij,jb->mab", Vt.conj(), conic.hermitian_basis(sub.r[k]), Vt)
                prog.lmi(np.zeros((m, m), dtype=complex), Y[k], images, {r_idx: np.eye(m)})
            if complement and s[k] is not None:
                row = unit.copy()
                row[s[k]] = -1.0
                prog.nonneg(row)

    res = prog.solve(objective, tol=tol)
    if res.status != conic.OPTIMAL:
        return SubproblemResult(None, res.status, iterations=res.iterations, raw_status=res.raw_status)

    x = res.x
    Wn = []
    for k in range(K):
        Yk = conic.to_matrix(x[Y[k].slice], sub.r[k])
        lam, vec = np.linalg.eigh(Yk)
        Yk = (vec * np.maximum(lam, 0.0)) @ vec.conj().T
        sk = max(x[s[k]], 0.0) if s[k] is not None else 0.0
        Wn.append(sub.full(k, Yk, sk))
    Wn = np.array(Wn)
    total = sum(np.trace(w).real for w in Wn)
    if total > 1.0:
        Wn /= total
    W = problem.P_T * Wn
    out = SubproblemResult(W, conic.OPTIMAL, iterations=res.iterations, raw_status=res.raw_status)
    out.objective = float(np.sum(surrogate_rates(W, expansion, problem.channels, problem.sigma_c2)))
    if irm is not None:
        out.r = max(float(x[r_idx]), 0.0) * problem.P_T
    out.residuals = feasibility_residuals(W, problem, expansion)
    limit = 1e-6 * problem.P_T
    if out.residuals["power"] > limit or out.residuals["coverage"] > limit:
        raise SolverFailure("solver returned a point outside the feasible set",
                            {"residuals": out.residuals, "raw_status": res.raw_status})
    return out


def feasibility_residuals(W: np.ndarray, problem: BeamProblem,
                          expansion: SurrogateExpansion | None = None) -> dict:
    """Positive values are constraint violations (power and coverage in watts, rate in bits)."""
    traces = np.array([np.trace(w).real for w in W])
    cov = -np.inf
    for k in range(problem.K):
        grid = problem.grid(k)
        A = steering_vector(grid, problem.geom)
        gains = np.einsum("gi,ij,gj->g", A.conj(), W[k], A).real
        centre = int(np.argmin(np.abs(grid - problem.theta_bar[k])))
        cov = max(cov, float(np.max(np.abs(gains[centre] - gains) - problem.B[k] * traces[k])))
    psd = max(-float(np.linalg.eigvalsh(w)[0]) for w in W)
    rates = (surrogate_rates(W, expansion, problem.channels, problem.sigma_c2)
             if expansion is not None else true_rates(W, problem.channels, problem.sigma_c2))
    return {"power": float(traces.sum() - problem.P_T), "coverage": cov, "psd": psd,
            "rate": float(np.max(problem.gamma - rates))}


# ---------------------------------------------------------------------------
# solution container


@dataclass
class BeamSolution:
    matrices: np.ndarray  # (K, N, N)
    vectors: np.ndarray  # (K, N)
    sca_objective: list = field(default_factory=list)  # true sum rate per SCA iterate
    sca_surrogate: list = field(default_factory=list)  # surrogate sum rate per SCA iterate
    irm_r: list = field(default_factory=list)
    statuses: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    relaxations: list = field(default_factory=list)
    status: str = "optimal"
    problem: BeamProblem | None = None
    penultimate: np.ndarray | None = None
    lambda_ratio: float = float("nan")

    @property
    def sca_iters(self) -> int:
        return len(self.sca_objective)

    @property
    def irm_iters(self) -> int:
        return len(self.irm_r)

    @property
    def r_final(self) -> float:
        return self.irm_r[-1] if self.irm_r else float("nan")


def extract_beamvector(W: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(0.5 * (W + W.conj().T))
    return math.sqrt(max(lam[-1], 0.0)) * vec[:, -1]


def lambda_ratio(W: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(0.5 * (W + W.conj().T))
    return float(max(lam[-2], 0.0) / lam[-1]) if lam[-1] > 0 else 0.0


def _finish(solution: BeamSolution) -> BeamSolution:
    solution.vectors = np.array([extract_beamvector(W) for W in solution.matrices])
    solution.lambda_ratio = max(lambda_ratio(W) for W in solution.matrices)
    return solution


# ---------------------------------------------------------------------------
# SCA


def solve_convex_subproblem(problem: BeamProblem, expansion: SurrogateExpansion,
                            _sub: _Subspace | None = None) -> SubproblemResult:
    """One SCA step.

    Backend trouble (numerical failure or a returned point outside the feasible
    set) triggers one retry at a looser tolerance; if that also fails the
    result carries status ``numerical_failure`` and the caller decides.
    """
    sub = _sub or _Subspace(problem)
    last = None
    for tol in (1e-9, 1e-7):
        try:
            res = _solve(problem, sub, expansion, tol=tol)
        except SolverFailure as exc:
            last = SubproblemResult(None, conic.NUMERICAL_FAILURE,
                                    raw_status=str(exc.diagnostics.get("raw_status", "")),
                                    residuals=exc.diagnostics.get("residuals", {}))
            continue
        if res.status != conic.NUMERICAL_FAILURE:
            return res
        last = res
    return last


def mrt_split_init(problem: BeamProblem) -> np.ndarray:
    A = steering_vector(problem.theta_bar, problem.geom)
    return np.array([(problem.P_T / problem.K) * np.outer(a, a.conj()) / problem.N for a in A])


def _relaxation_ladder(problem: BeamProblem):
    yield problem, None
    for j in range(1, 4):
        yield replace(problem, gamma=problem.gamma / 2**j), f"rate_floor/{2**j}"
    yield replace(problem, gamma=problem.gamma / 8, coverage=False), "coverage_centre_only"


def solve_sca(problem: BeamProblem, init: np.ndarray | None = None, tol: float = 1e-4,
              max_iter: int = 15, monotone_slack: float = 1e-6) -> BeamSolution:
    W = mrt_split_init(problem) if init is None else np.asarray(init)
    relaxations = []
    for candidate, label in _relaxation_ladder(problem):
        if label:
            relaxations.append(label)
        sub = _Subspace(candidate)
        expansion = make_expansion(W, candidate.channels, candidate.sigma_c2)
        res = solve_convex_subproblem(candidate, expansion, sub)
        if res.status == conic.OPTIMAL:
            problem = candidate
            break
    else:
        raise InfeasibleProblem("beam design infeasible after the relaxation ladder",
                                {"relaxations": relaxations})

    iterates = [W, res.W]
    true_obj = [float(np.sum(true_rates(res.W, problem.channels, problem.sigma_c2)))]
    surrogate = [res.objective]
    statuses = [res.raw_status]
    previous = float(np.sum(true_rates(W, problem.channels, problem.sigma_c2)))
    residuals = res.residuals
    while True:
        change = abs(true_obj[-1] - previous) / max(abs(previous), 1e-12)
        if change < tol or len(true_obj) >= max_iter:
            break
        expansion = make_expansion(iterates[-1], problem.channels, problem.sigma_c2)
        res = solve_convex_subproblem(problem, expansion, sub)
        if res.status != conic.OPTIMAL:
            # the expansion point is feasible, so this is backend trouble; keep it
            warnings.warn(f"SCA subproblem returned {res.status} ({res.raw_status}); "
                          "keeping the previous iterate", RuntimeWarning, stacklevel=2)
            break
        value = float(np.sum(true_rates(res.W, problem.channels, problem.sigma_c2)))
        if value < true_obj[-1] - monotone_slack:
            warnings.warn(f"SCA objective decreased ({true_obj[-1]:.9g} -> {value:.9g}); "
                          "keeping the previous iterate", RuntimeWarning, stacklevel=2)
            break
        previous = true_obj[-1]
        iterates.append(res.W)
        true_obj.append(value)
        surrogate.append(res.objective)
        statuses.append(res.raw_status)
        residuals = res.residuals
    sol = BeamSolution(iterates[-1], np.zeros((problem.K, problem.N), complex), true_obj,
                       surrogate, statuses=statuses, residuals=residuals,
                       relaxations=relaxations, problem=problem, penultimate=iterates[-2])
    return _finish(sol)


# ---------------------------------------------------------------------------
# IRM


def solve_irm(sca_out: BeamSolution, problem: BeamProblem | None = None,
              sca_penultimate: np.ndarray | None = None, w0: float = 0.01, rho: float = 2.0,
              tol: float = 1e-6, max_iter: int = 20) -> BeamSolution:
    """Drive the SCA solution to rank one with a growing penalty on the slack r_p.

    The rate linearisation stays fixed at the penultimate SCA iterate. Each
    subproblem is first solved without a bound on r; if that fails or returns
    a larger slack than the previous iterate, it is re-solved with r capped by
    the previous slack (the previous iterate is feasible there). Only
    non-increasing slacks are accepted; otherwise the loop stops at the last
    accepted iterate.
    """
    problem = problem or sca_out.problem
    penultimate = sca_out.penultimate if sca_penultimate is None else sca_penultimate
    sub = _Subspace(problem)
    expansion = make_expansion(penultimate, problem.channels, problem.sigma_c2)
    threshold = tol / problem.N  # normalised units: r_p / P_T
    M = sca_out.matrices
    r_prev = max(max(float(np.linalg.eigvalsh(m)[-2]) for m in M) / problem.P_T, 0.0)
    slack = 1e-8 / problem.P_T  # allowed increase of r_p, in watts before normalising
    r_trace, statuses = [], []
    residuals = sca_out.residuals
    if r_prev < threshold:
        # already rank one: r = lambda_2 is feasible and optimal at p = 1
        sol = replace(sca_out, irm_r=[r_prev * problem.P_T])
        return _finish(sol)

    def attempt(spec):
        for solve_tol in (1e-9, 1e-7):
            try:
                res = _solve(problem, sub, expansion, spec, tol=solve_tol)
            except SolverFailure:
                continue
            if res.status == conic.OPTIMAL:
                return res
        return None

    for p in range(1, max_iter + 1):
        bases = _irm_bases(sub, M / problem.P_T)
        weight = w0 * rho**p
        res = attempt(_IrmSpec(bases, weight, None))
        if res is None or res.r / problem.P_T > r_prev + slack:
            capped = attempt(_IrmSpec(bases, weight, r_prev + slack))
            if capped is not None and capped.r / problem.P_T <= r_prev + slack:
                res = capped
            elif res is not None and res.r / problem.P_T > r_prev + slack:
                res = None
        if res is None:
            if not r_trace:
                raise SolverFailure("IRM subproblem failed", {"p": p})
            break
        M = res.W
        residuals = res.residuals
        r_prev = res.r / problem.P_T
        r_trace.append(res.r)
        statuses.append(res.raw_status)
        if r_prev < threshold:
            break
    sol = replace(sca_out, matrices=M, irm_r=r_trace, statuses=sca_out.statuses + statuses,
                  residuals=residuals)
    sol = _finish(sol)
    if r_trace[-1] / problem.P_T >= threshold:
        sol.status = "not_rank_one"
        raise NearRankOneFailure(f"IRM slack {r_trace[-1]:.3g} did not fall below threshold",
                                 sol, sol.lambda_ratio)
    return sol


def design_beams(problem: BeamProblem, config=None, init=None) -> BeamSolution:
    """SCA followed by IRM; a rank-one failure keeps the best iterate with its status."""
    kw = {}
    irm_kw = {}
    if config is not None:
        kw = dict(tol=config.sca_tol, max_iter=config.sca_max_iter)
        irm_kw = dict(w0=config.irm_w0, rho=config.irm_rho, tol=config.irm_tol,
                      max_iter=config.irm_max_iter)
    sca = solve_sca(problem, init, **kw)
    try:
        return solve_irm(sca, **irm_kw)
    except NearRankOneFailure as exc:
        return exc.solution
    except SolverFailure:
        # IRM could not start; the SCA point is feasible but possibly not rank one
        sca.status = "not_rank_one"
        return sca


# ---------------------------------------------------------------------------
# baselines


def waterfill(gains: np.ndarray, P_T: float, sigma_c2: float) -> np.ndarray:
    """Powers p_k = max(0, mu - sigma^2/g_k) with sum(p) = P_T."""
    gains = np.asarray(gains, float)
    floors = sigma_c2 / gains
    order = np.argsort(floors)
    sorted_floors = floors[order]
    for m in range(len(gains), 0, -1):
        level = (P_T + sorted_floors[:m].sum()) / m
        if level > sorted_floors[m - 1]:
            break
    p = np.maximum(level - floors, 0.0)
    return p


def waterfill_mrt(theta_bar, d_bar, P_T: float, sigma_c2: float, geom: ArrayGeometry,
                  alpha0: float = 1.0) -> BeamSolution:
    theta_bar = np.atleast_1d(np.asarray(theta_bar, float))
    d_bar = np.atleast_1d(np.asarray(d_bar, float))
    gains = geom.N_t * alpha0**2 / d_bar**2
    p = waterfill(gains, P_T, sigma_c2)
    A = steering_vector(theta_bar, geom)
    vectors = np.sqrt(p)[:, None] * A / math.sqrt(geom.N_t)
    matrices = np.einsum("kn,km->knm", vectors, vectors.conj())
    return BeamSolution(matrices, vectors, status="waterfilling", lambda_ratio=0.0)


def omni_precoder(P_T: float, geom: ArrayGeometry) -> BeamSolution:
    C = omni_covariance(P_T, geom.N_t)
    vectors = math.sqrt(P_T / geom.N_t) * np.eye(geom.N_t, dtype=complex)
    return BeamSolution(C[None], vectors, status="omni", lambda_ratio=1.0)
