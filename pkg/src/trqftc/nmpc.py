"""Nonlinear MPC by direct multiple shooting and Gauss-Newton SQP.

The horizon is split into ``N`` shooting intervals of length ``dt``; the
states at interval boundaries are decision variables tied together by
defect constraints ``Phi(x_t, u_t) - x_{t+1} = 0``, where ``Phi`` runs
RK4 over the interval. Each SQP iteration:

1. linearizes ``Phi`` by central finite differences (batched),
2. condenses the linearized defects into the input step and solves the
   resulting box-constrained QP on the inputs exactly (active set),
3. backtracks on an l1 merit function ``J + mu * sum |defects|``; state
   bounds are enforced by projecting trial points.

The cost is the tracking objective

    J = sum_{t=0}^{N-1} (x_{t+1} - r_t)' Q (x_{t+1} - r_t) + u~_t' R u~_t

with ``u~ = u`` (absolute mode) or ``u~ = u - u_trim`` (deviation mode),
plus the observer output-error term when a correction is supplied. Since
``x_0`` is fixed, the stage pairs each input with the state it produces.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ._kernels import rk4_rows, wrench_rows
from .allocation import RotorGeometry, hover_command, input_bounds
from .eso import ModelCorrection, output_error_cost
from .model import SingularityError, rigid_body_batch
from .qp import QPError, solve_box_qp
from .state import NU, NX, TILT, ActuatorCommand, State
from .vehicle import DEFAULT_PARAMS, VehicleParams

log = logging.getLogger(__name__)

ModelFn = Callable[[NDArray[np.float64], NDArray[np.float64], "NDArray[np.float64] | None"], NDArray[np.float64]]

PENALTY_MODES = ("absolute", "deviation")


def default_Q() -> NDArray[np.float64]:
    return np.array([10.0] * 3 + [1.0] * 3 + [10.0] * 3 + [1.0] * 3)


def default_R() -> NDArray[np.float64]:
    return np.array([0.1] * 4 + [0.001] * 4)


def default_step_limit() -> NDArray[np.float64]:
    """Largest change per SQP iteration: 0.5 rad on tilts, throttles free."""
    return np.array([0.5] * 4 + [np.inf] * 4)


def default_state_bounds() -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lo = np.full(NX, -np.inf)
    hi = np.full(NX, np.inf)
    lo[7], hi[7] = -1.4, 1.4
    return lo, hi


@dataclass
class OcpConfig:
    """Horizon, weights, bounds and solver settings.

    ``Q`` and ``R`` are diagonal weights; their lengths fix the state and
    input dimensions. ``substeps`` is the number of RK4 steps per shooting
    interval. ``step_limit`` caps each input's change per SQP iteration
    (a box trust region); tilt thrust directions are periodic, so an
    unbounded Gauss-Newton step can hop to the mirrored tilt between
    iterations. Left as None it defaults to :func:`default_step_limit`
    for the 8-input vehicle and to no limit otherwise.
    """

    horizon: int = 10
    dt: float = 0.1
    Q: NDArray[np.float64] = field(default_factory=default_Q)
    R: NDArray[np.float64] = field(default_factory=default_R)
    state_lower: NDArray[np.float64] = field(default_factory=lambda: default_state_bounds()[0])
    state_upper: NDArray[np.float64] = field(default_factory=lambda: default_state_bounds()[1])
    input_lower: NDArray[np.float64] = field(default_factory=lambda: input_bounds(DEFAULT_PARAMS)[0])
    input_upper: NDArray[np.float64] = field(default_factory=lambda: input_bounds(DEFAULT_PARAMS)[1])
    max_sqp_iters: int = 30
    kkt_tol: float = 1e-6
    input_penalty_mode: str = "deviation"
    substeps: int = 2
    fd_step: float = 1e-6
    step_limit: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        if self.step_limit is None:
            nu = np.size(self.R)
            self.step_limit = default_step_limit() if nu == NU else np.full(nu, np.inf)
        for name in ("Q", "R", "state_lower", "state_upper", "input_lower", "input_upper", "step_limit"):
            setattr(self, name, np.array(getattr(self, name), dtype=float).ravel())
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if np.any(self.Q < 0) or np.any(self.R < 0):
            raise ValueError("weights must be nonnegative")
        if self.state_lower.shape != self.Q.shape or self.state_upper.shape != self.Q.shape:
            raise ValueError("state bounds must match Q")
        if self.input_lower.shape != self.R.shape or self.input_upper.shape != self.R.shape:
            raise ValueError("input bounds must match R")
        if self.step_limit.shape != self.R.shape or np.any(self.step_limit <= 0):
            raise ValueError("step_limit must match R and be positive")
        if np.any(self.state_lower > self.state_upper) or np.any(self.input_lower > self.input_upper):
            raise ValueError("bounds must satisfy min <= max")
        if self.input_penalty_mode not in PENALTY_MODES:
            raise ValueError(f"input_penalty_mode must be one of {PENALTY_MODES}")
        if self.substeps < 1 or self.max_sqp_iters < 0:
            raise ValueError("substeps must be >= 1 and max_sqp_iters >= 0")

    @property
    def nx(self) -> int:
        return self.Q.shape[0]

    @property
    def nu(self) -> int:
        return self.R.shape[0]

    def frozen_tilt(self) -> "OcpConfig":
        """Same problem with all tilt angles pinned at zero (conventional quadcopter)."""
        lo = self.input_lower.copy()
        hi = self.input_upper.copy()
        lo[TILT] = 0.0
        hi[TILT] = 0.0
        return replace(self, input_lower=lo, input_upper=hi)


@dataclass
class OcpSolution:
    """Solution of one horizon problem.

    ``inputs`` has shape (N, nu) and ``predicted_states`` (N + 1, nx), the
    first row being the initial state.
    """

    inputs: NDArray[np.float64]
    predicted_states: NDArray[np.float64]
    cost: float = 0.0
    kkt_residual: float = np.inf
    sqp_iters: int = 0
    converged: bool = False
    max_defect: float = 0.0
    status: str = "unsolved"

    def commands(self) -> list[ActuatorCommand]:
        return [ActuatorCommand.from_vector(u) for u in self.inputs]

    def states(self) -> list[State]:
        return [State.from_vector(x) for x in self.predicted_states]


def stage_cost(
    x: ArrayLike,
    x_ref: ArrayLike,
    u: ArrayLike,
    config: OcpConfig,
    u_trim: ArrayLike | None = None,
    correction: ModelCorrection | None = None,
) -> float:
    """Weighted tracking error plus input effort of one stage.

    With ``correction`` the observer output-error term is added; the
    solver adds it once, at the first stage.
    """
    x = np.asarray(x.as_vector() if isinstance(x, State) else x, dtype=float)
    x_ref = np.asarray(x_ref.as_vector() if isinstance(x_ref, State) else x_ref, dtype=float)
    u = np.asarray(u.as_vector() if isinstance(u, ActuatorCommand) else u, dtype=float)
    dx = x - x_ref
    du = u
    if config.input_penalty_mode == "deviation":
        if u_trim is None:
            raise ValueError("deviation mode needs u_trim")
        du = u - np.asarray(u_trim, dtype=float)
    return float(dx @ (config.Q * dx) + du @ (config.R * du)) + output_error_cost(correction)


class PredictionModel:
    """Continuous-time model ``x' = f(x, u, e)`` split for held inputs.

    ``input_effect`` maps an input batch to whatever ``derivative`` needs;
    since inputs are held over a shooting interval it is evaluated once per
    interval instead of once per RK4 stage. The base class wraps a plain
    callable ``f(X, U, e)``.
    """

    def __init__(self, f: ModelFn | None = None) -> None:
        self._f = f

    def input_effect(self, U: NDArray[np.float64]):
        return U

    def derivative(self, X: NDArray[np.float64], effect, e=None, singular="raise") -> NDArray[np.float64]:
        """``singular="nan"`` asks for NaN rows instead of an exception where
        the model is undefined; plain callables only support raising."""
        return self._f(X, effect, e)

    def __call__(self, X, U, e=None):
        return self.derivative(X, self.input_effect(U), e)

    def integrate(self, X, U, e, h: float, substeps: int, singular: str = "raise"):
        """RK4 over ``substeps`` steps of ``h`` with each row's input held."""
        w = self.input_effect(U)

        def f(Z):
            return self.derivative(Z, w, e, singular)

        for _ in range(substeps):
            k1 = f(X)
            k2 = f(X + 0.5 * h * k1)
            k3 = f(X + 0.5 * h * k2)
            k4 = f(X + h * k3)
            X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return X


class TrqPredictionModel(PredictionModel):
    """Nominal tilt-rotor model; the input effect is the body wrench."""

    def __init__(self, params: VehicleParams | None = None, geometry: RotorGeometry | None = None) -> None:
        super().__init__()
        self.params = params or DEFAULT_PARAMS
        self.geometry = geometry or RotorGeometry.x_config(self.params.arm_length)
        perp, axial = self.geometry._frames()
        g = self.geometry
        self._wrench_args = (
            np.ascontiguousarray(g.positions), np.ascontiguousarray(g.spin_dirs, dtype=float),
            np.ascontiguousarray(perp), np.ascontiguousarray(axial),
            np.asarray(self.params.thrust_coeffs, dtype=float),
            np.asarray(self.params.torque_coeffs, dtype=float),
        )

    def input_effect(self, U):
        U = np.ascontiguousarray(np.atleast_2d(U), dtype=float)
        return wrench_rows(U, *self._wrench_args)

    def derivative(self, X, effect, e=None, singular="raise"):
        force, torque = effect
        return rigid_body_batch(X, force, torque, self.params, correction=e, singular=singular)

    def integrate(self, X, U, e, h, substeps, singular="raise"):
        force, torque = self.input_effect(U)
        p = self.params
        ev = np.zeros(6) if e is None else np.asarray(e, dtype=float).reshape(6)
        ixx, iyy, izz = p.inertia_diag
        out, bad = rk4_rows(
            np.ascontiguousarray(X, dtype=float), force, torque, ev,
            p.mass, p.gravity, ixx, iyy, izz, h, substeps,
        )
        if singular == "raise" and bad.any():
            raise SingularityError("prediction reaches the Euler-rate singularity")
        return out


def trq_prediction_model(
    params: VehicleParams | None = None, geometry: RotorGeometry | None = None
) -> TrqPredictionModel:
    """Nominal tilt-rotor model for the predictor."""
    return TrqPredictionModel(params, geometry)


class NmpcSolver:
    """Multiple-shooting SQP solver for one model and configuration.

    Holds no state between calls besides configuration, but instances are
    not meant to be shared across threads while solving.
    """

    def __init__(self, model: PredictionModel | ModelFn, config: OcpConfig, u_trim: ArrayLike | None = None) -> None:
        self.model = model if isinstance(model, PredictionModel) else PredictionModel(model)
        self.config = config
        nu = config.nu
        self.u_trim = np.zeros(nu) if u_trim is None else np.asarray(u_trim, dtype=float).reshape(nu)
        self.u_trim = np.clip(self.u_trim, config.input_lower, config.input_upper)
        if config.input_penalty_mode == "deviation":
            self._u_ref = self.u_trim
        else:
            self._u_ref = np.zeros(nu)

    @classmethod
    def for_vehicle(
        cls,
        config: OcpConfig | None = None,
        params: VehicleParams | None = None,
        geometry: RotorGeometry | None = None,
    ) -> "NmpcSolver":
        params = params or DEFAULT_PARAMS
        config = config or OcpConfig()
        return cls(trq_prediction_model(params, geometry), config, hover_command(params).as_vector())

    # shooting map

    def shoot(self, X: NDArray[np.float64], U: NDArray[np.float64], e=None, singular="raise") -> NDArray[np.float64]:
        """Integrate each row of ``X`` over one interval with the matching input."""
        cfg = self.config
        return self.model.integrate(X, U, e, cfg.dt / cfg.substeps, cfg.substeps, singular)

    def linearize(self, X: NDArray[np.float64], U: NDArray[np.float64], e=None):
        """Shooting map and its Jacobians at every interval start.

        Returns ``Phi`` (N, nx), ``A`` (N, nx, nx), ``B`` (N, nx, nu) from
        central differences evaluated in one batch.
        """
        cfg = self.config
        N, nx = X.shape
        nu = U.shape[1]
        nz = nx + nu
        Z = np.concatenate([X, U], axis=1)
        steps = cfg.fd_step * (1.0 + np.abs(Z))
        pert = np.zeros((N, 2 * nz + 1, nz))
        idx = np.arange(nz)
        pert[:, 1 + idx, idx] = steps
        pert[:, 1 + nz + idx, idx] = -steps
        Zb = (Z[:, None, :] + pert).reshape(-1, nz)
        out = self.shoot(Zb[:, :nx], Zb[:, nx:], e).reshape(N, 2 * nz + 1, nx)
        phi = out[:, 0]
        jac = (out[:, 1 : 1 + nz] - out[:, 1 + nz :]) / (2.0 * steps[:, :, None])
        jac = np.transpose(jac, (0, 2, 1))
        return phi, jac[:, :, :nx], jac[:, :, nx:]

    # cost pieces

    def _objective(self, X, U, refs) -> float:
        cfg = self.config
        dx = X[1:] - refs
        du = U - self._u_ref
        return float(np.sum(cfg.Q * dx * dx) + np.sum(cfg.R * du * du))

    def trajectory_cost(self, sol: OcpSolution, refs: ArrayLike, correction: ModelCorrection | None = None) -> float:
        refs = self._refs(refs)
        return self._objective(sol.predicted_states, sol.inputs, refs) + output_error_cost(correction)

    def _refs(self, refs) -> NDArray[np.float64]:
        rows = [r.as_vector() if isinstance(r, State) else np.asarray(r, dtype=float) for r in refs]
        R = np.array(rows, dtype=float).reshape(-1, self.config.nx)
        if R.shape[0] != self.config.horizon:
            raise ValueError(f"expected {self.config.horizon} reference rows, got {R.shape[0]}")
        return R

    def _project_states(self, X):
        cfg = self.config
        X = X.copy()
        X[1:] = np.clip(X[1:], cfg.state_lower, cfg.state_upper)
        return X

    def _defects(self, X, U, e):
        return self.shoot(X[:-1], U, e) - X[1:]

    # solve

    def initial_guess(self, x0, warm_start: OcpSolution | None, e=None):
        cfg = self.config
        N = cfg.horizon
        if warm_start is not None and warm_start.inputs.shape == (N, cfg.nu):
            U = np.clip(warm_start.inputs, cfg.input_lower, cfg.input_upper)
            X = np.array(warm_start.predicted_states, dtype=float)
            X[0] = x0
            return self._project_states(X), U
        U = np.tile(self.u_trim, (N, 1))
        X = np.empty((N + 1, cfg.nx))
        X[0] = x0
        for t in range(N):
            X[t + 1] = self.shoot(X[t : t + 1], U[t : t + 1], e)[0]
        return self._project_states(X), U

    def solve(
        self,
        x0: ArrayLike,
        refs,
        correction: ModelCorrection | ArrayLike | None = None,
        warm_start: OcpSolution | None = None,
    ) -> OcpSolution:
        """Solve the horizon problem from ``x0`` tracking ``refs`` (N rows).

        ``correction`` is a :class:`ModelCorrection` (its ``e`` enters the
        prediction model, its output error the cost) or a raw vector
        passed straight to the model.
        """
        cfg = self.config
        x0 = np.asarray(x0.as_vector() if isinstance(x0, State) else x0, dtype=float).reshape(cfg.nx)
        refs = self._refs(refs)
        if isinstance(correction, ModelCorrection):
            e = correction.e
            extra = output_error_cost(correction)
        else:
            e = None if correction is None else np.asarray(correction, dtype=float)
            extra = 0.0
        N, nx, nu = cfg.horizon, cfg.nx, cfg.nu
        lo_u, hi_u = cfg.input_lower, cfg.input_upper
        Qv = np.tile(cfg.Q, N)
        Rv = np.tile(cfg.R, N)

        try:
            X, U = self.initial_guess(x0, warm_start, e)
        except SingularityError as exc:
            log.warning("initial rollout failed: %s", exc)
            U = np.tile(np.clip(self.u_trim, lo_u, hi_u), (N, 1))
            X = np.tile(x0, (N + 1, 1))
        mu = 1.0
        status = "max_iter"
        kkt = np.inf
        iters = 0
        active = None

        for it in range(cfg.max_sqp_iters + 1):
            try:
                phi, A, B = self.linearize(X[:-1], U, e)
            except SingularityError as exc:
                log.warning("linearization failed: %s", exc)
                status = "model_error"
                break
            c = phi - X[1:]
            gx = 2.0 * cfg.Q * (X[1:] - refs)
            gu = 2.0 * cfg.R * (U - self._u_ref)
            lam = np.empty((N, nx))
            lam[N - 1] = gx[N - 1]
            for t in range(N - 2, -1, -1):
                lam[t] = gx[t] + A[t + 1].T @ lam[t + 1]
            gl = gu + np.einsum("tij,ti->tj", B, lam)
            pg = U - np.clip(U - gl, lo_u, hi_u)
            kkt = max(float(np.max(np.abs(pg))), float(np.max(np.abs(c))))
            if kkt < cfg.kkt_tol:
                status = "converged"
                break
            if it == cfg.max_sqp_iters:
                break

            # condense: dx_{t+1} = A_t dx_t + B_t du_t + c_t, dx_0 = 0
            S = np.zeros((N, nx, N, nu))
            s = np.zeros((N, nx))
            for t in range(N):
                if t > 0:
                    S[t, :, :t] = np.einsum("ij,jkl->ikl", A[t], S[t - 1, :, :t])
                    s[t] = A[t] @ s[t - 1] + c[t]
                else:
                    s[0] = c[0]
                S[t, :, t] = B[t]
            Sm = S.reshape(N * nx, N * nu)
            ex = (X[1:] - refs + s).ravel()
            eu = (U - self._u_ref).ravel()
            H = 2.0 * (Sm.T @ (Qv[:, None] * Sm) + np.diag(Rv))
            H[np.diag_indices_from(H)] += 1e-10 * (1.0 + np.trace(H) / H.shape[0])
            g = 2.0 * (Sm.T @ (Qv * ex) + Rv * eu)
            try:
                lo_d = np.maximum(lo_u - U, -cfg.step_limit).ravel()
                hi_d = np.minimum(hi_u - U, cfg.step_limit).ravel()
                du, _, _ = solve_box_qp(H, g, lo_d, hi_d, active0=active)
                active = np.where(du <= lo_d, -1, np.where(du >= hi_d, 1, 0))
            except (QPError, np.linalg.LinAlgError) as exc:
                log.warning("QP failed: %s", exc)
                status = "qp_failed"
                break
            dX = (Sm @ du + s.ravel()).reshape(N, nx)
            dU = du.reshape(N, nu)

            # defect multipliers of the QP solution fix the merit penalty
            gx_new = 2.0 * cfg.Q * (X[1:] + dX - refs)
            lam_qp = np.empty((N, nx))
            lam_qp[N - 1] = gx_new[N - 1]
            for t in range(N - 2, -1, -1):
                lam_qp[t] = gx_new[t] + A[t + 1].T @ lam_qp[t + 1]
            mu = max(mu, 1.1 * float(np.max(np.abs(lam_qp))) + 1e-6)

            phi0 = self._objective(X, U, refs) + mu * float(np.abs(c).sum())
            slope = float(np.sum(gx * dX) + np.sum(gu * dU)) - mu * float(np.abs(c).sum())
            trial = self._line_search(x0, X, U, dX, dU, refs, e, mu, phi0, slope)
            if trial is None:
                status = "line_search_failed"
                break
            Xt, Ut, phit, alpha = trial
            log.debug(
                "sqp %d: merit %.6g -> %.6g, alpha %.3g, mu %.3g, kkt %.3g, |c| %.3g",
                it, phi0, phit, alpha, mu, kkt, float(np.max(np.abs(c))),
            )
            X, U = Xt, Ut
            iters += 1

        max_defect = float(np.max(np.abs(self._defects(X, U, e)))) if status != "model_error" else np.inf
        if np.isfinite(max_defect) and max_defect > 1e-7:
            X, max_defect = self._close_gaps(X, U, e, max_defect)
        cost = self._objective(X, U, refs) + extra
        return OcpSolution(
            inputs=U,
            predicted_states=X,
            cost=cost,
            kkt_residual=kkt,
            sqp_iters=iters,
            converged=status == "converged",
            max_defect=max_defect,
            status=status,
        )

    def _safe_shoot(self, X, U, e, group):
        """:meth:`shoot` that marks rows of failing groups as NaN instead of raising."""
        try:
            return self.shoot(X, U, e, singular="nan")
        except SingularityError:
            pass
        out = np.full(X.shape, np.nan)
        for k in range(0, X.shape[0], group):
            try:
                out[k : k + group] = self.shoot(X[k : k + group], U[k : k + group], e)
            except SingularityError:
                pass
        return out

    def _line_search(self, x0, X, U, dX, dU, refs, e, mu, phi0, slope, n_trials=10):
        """Backtracking on the l1 merit with all step lengths evaluated in one batch.

        Two candidates per step length: the projected multiple-shooting
        point, and its second-order correction that re-simulates the states
        from the trial inputs so the defects vanish. The largest step length
        with an Armijo-acceptable candidate wins; ties go to the lower merit.
        """
        cfg = self.config
        N = cfg.horizon
        alphas = 0.5 ** np.arange(n_trials)
        Xt = np.repeat(X[None], n_trials, axis=0)
        Xt[:, 1:] += alphas[:, None, None] * dX
        Xt[:, 1:] = np.clip(Xt[:, 1:], cfg.state_lower, cfg.state_upper)
        Ut = np.clip(U + alphas[:, None, None] * dU, cfg.input_lower, cfg.input_upper)

        target = phi0 + 1e-4 * alphas * min(slope, 0.0)
        ms_merit = self._batch_merit(Xt, Ut, refs, e, mu)
        if ms_merit[0] <= target[0]:
            return Xt[0], Ut[0], float(ms_merit[0]), 1.0

        Xr = np.empty_like(Xt)
        Xr[:, 0] = x0
        for t in range(N):
            Xr[:, t + 1] = self._safe_shoot(Xr[:, t], Ut[:, t], e, 1)
        Xr[:, 1:] = np.clip(Xr[:, 1:], cfg.state_lower, cfg.state_upper)
        soc_merit = self._batch_merit(Xr, Ut, refs, e, mu)
        for k in range(n_trials):
            pair = [(m, X_) for m, X_ in ((ms_merit[k], Xt[k]), (soc_merit[k], Xr[k])) if m <= target[k]]
            if pair:
                m, X_ = min(pair, key=lambda c: c[0])
                return X_, Ut[k], float(m), float(alphas[k])
        return None

    def _batch_merit(self, Xc, Uc, refs, e, mu):
        cfg = self.config
        K, N, nx, nu = Xc.shape[0], cfg.horizon, cfg.nx, cfg.nu
        phi = self._safe_shoot(Xc[:, :-1].reshape(-1, nx), Uc.reshape(-1, nu), e, N)
        defects = phi.reshape(K, N, nx) - Xc[:, 1:]
        dx = Xc[:, 1:] - refs
        du = Uc - self._u_ref
        merit = (
            np.einsum("knj,j->k", dx * dx, cfg.Q)
            + np.einsum("knj,j->k", du * du, cfg.R)
            + mu * np.abs(defects).sum(axis=(1, 2))
        )
        merit[~np.isfinite(merit)] = np.inf
        return merit

    def _close_gaps(self, X, U, e, max_defect):
        # re-simulate the inputs so the returned plan is dynamically consistent
        cfg = self.config
        Xr = X.copy()
        try:
            for t in range(cfg.horizon):
                Xr[t + 1] = self.shoot(Xr[t : t + 1], U[t : t + 1], e)[0]
        except SingularityError:
            return X, max_defect
        inside = np.all(Xr[1:] >= cfg.state_lower) and np.all(Xr[1:] <= cfg.state_upper)
        if not inside or not np.all(np.isfinite(Xr)):
            return X, max_defect
        return Xr, 0.0


def solve_ocp(
    x0: ArrayLike,
    refs,
    correction: ModelCorrection | None = None,
    warm_start: OcpSolution | None = None,
    config: OcpConfig | None = None,
    params: VehicleParams | None = None,
    geometry: RotorGeometry | None = None,
) -> OcpSolution:
    """Solve one horizon problem for the nominal tilt-rotor model."""
    return NmpcSolver.for_vehicle(config, params, geometry).solve(x0, refs, correction, warm_start)


def receding_horizon_input(sol: OcpSolution, config: OcpConfig | None = None) -> NDArray[np.float64]:
    """First input of the plan, clamped to the input bounds."""
    if sol.inputs.shape[0] < 1:
        raise ValueError("solution holds no inputs")
    u = sol.inputs[0]
    if config is not None:
        u = np.clip(u, config.input_lower, config.input_upper)
    return np.array(u, dtype=float)


def shift_warm_start(sol: OcpSolution) -> OcpSolution:
    """Advance a plan by one interval: drop the first stage, repeat the last."""
    inputs = np.vstack([sol.inputs[1:], sol.inputs[-1:]])
    states = np.vstack([sol.predicted_states[1:], sol.predicted_states[-1:]])
    out = copy.copy(sol)
    out.inputs = inputs
    out.predicted_states = states
    return out
