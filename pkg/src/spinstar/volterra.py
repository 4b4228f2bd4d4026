"""Linear Volterra integrodifferential solvers for exponential-sum kernels.

Solves  x'(t) = - int_0^t k(t-s) x(s) ds + drive(t)  with
k(tau) = sum_i a_i exp(r_i tau), by two independent routes:

* ``aux_ode`` (production, O(T)): one auxiliary variable per kernel term,
  u_i' = r_i u_i + x, x' = -sum_i a_i u_i + drive, stepped with classic RK4.
* ``quadrature`` (verifier, O(T^2)): trapezoidal memory sums on a uniform
  grid with an implicit-trapezoid step, kept deliberately simple and
  independent of the reduction above.

Both routes accept batches of independent scalar problems (the sector
equations of the master solvers) as leading array dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KernelSpec",
    "SolveOptions",
    "NumericsError",
    "solve_volterra",
    "solve_volterra_batch",
    "integrate_linear_ode",
]


class NumericsError(RuntimeError):
    """Raised when a solver produces non-finite values or fails to converge."""


@dataclass(frozen=True)
class KernelSpec:
    """Memory kernel k(tau) = sum_i a_i exp(r_i tau), plus an optional constant drive."""

    terms: tuple[tuple[complex, complex], ...]
    inhomogeneity: complex | None = None

    def __post_init__(self):
        for a, r in self.terms:
            if not (np.isfinite(complex(a)) and np.isfinite(complex(r))):
                raise ValueError("kernel amplitudes and rates must be finite")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for a, _ in self.terms], dtype=complex)

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for _, r in self.terms], dtype=complex)


@dataclass(frozen=True)
class SolveOptions:
    """Solver knobs.

    ``step`` is the internal step bound (output intervals are subdivided to
    respect it).  ``tolerance=None`` means a single fixed-step pass; a float
    enables step-halving control: the step is halved until two successive
    refinements agree to the tolerance (sup norm over all outputs), failing
    with NumericsError after ``max_halvings``.
    """

    step: float = 0.005
    method: str = "aux_ode"
    tolerance: float | None = None
    max_halvings: int = 12

    def __post_init__(self):
        if not (self.step > 0.0):
            raise ValueError("step must be positive")
        if self.method not in ("aux_ode", "quadrature"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.tolerance is not None and not (self.tolerance > 0.0):
            raise ValueError("tolerance must be positive")


def _validate_grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("times must be a non-empty 1-D array")
    if abs(t[0]) > 1e-14:
        raise ValueError("times must start at 0 (the memory integral starts there)")
    if t.size > 1 and not np.all(np.diff(t) > 0.0):
        raise ValueError("times must be strictly increasing")
    return t


def _rk4_fixed(rhs, y0: np.ndarray, times: np.ndarray, step: float) -> np.ndarray:
    """Classic RK4 from times[0] through all output points, substepping to <= step."""
    out = np.empty((times.size,) + y0.shape, dtype=y0.dtype)
    out[0] = y0
    y = y0
    for n in range(times.size - 1):
        t0, t1 = times[n], times[n + 1]
        nsub = max(1, int(np.ceil((t1 - t0) / step - 1e-12)))
        h = (t1 - t0) / nsub
        t = t0
        for _ in range(nsub):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[n + 1] = y
    return out


def integrate_linear_ode(y0, generator, times, opts: SolveOptions | None = None):
    """Integrate y' = generator(t, y) (linear in y) with RK4 and optional step halving.

    Returns an array of shape ``(len(times),) + y0.shape``.  With a
    tolerance set, the step is halved until two refinements agree; the finer
    solution is returned.
    """
    opts = opts or SolveOptions()
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or (t.size > 1 and not np.all(np.diff(t) > 0.0)):
        raise ValueError("times must be a non-empty, strictly increasing 1-D array")
    y0 = np.asarray(y0, dtype=complex)

    # clamp to the widest output interval so that halving the step always
    # refines the integration (otherwise ceil() keeps the substep count at 1
    # and the error control sees two identical passes)
    step = opts.step
    if t.size > 1:
        step = min(step, float(np.max(np.diff(t))))

    sol = _rk4_fixed(generator, y0, t, step)
    if not np.all(np.isfinite(sol.view(float))):
        raise NumericsError(
            f"non-finite values during RK4 integration at step {step:g}"
        )
    if opts.tolerance is None:
        return sol
    for _ in range(opts.max_halvings):
        step *= 0.5
        finer = _rk4_fixed(generator, y0, t, step)
        if not np.all(np.isfinite(finer.view(float))):
            raise NumericsError(f"non-finite values during RK4 integration at step {step:g}")
        err = float(np.max(np.abs(finer - sol)))
        sol = finer
        if err <= opts.tolerance:
            return sol
    raise NumericsError(
        f"step halving did not reach tolerance {opts.tolerance:g} "
        f"within {opts.max_halvings} halvings (last step {step:g})"
    )


def _aux_ode_solve(x0, amps, rates, times, opts: SolveOptions, drive):
    n_prob, n_terms = amps.shape

    def rhs(t, y):
        x = y[:, 0]
        u = y[:, 1:]
        dx = -np.add.reduce(amps * u, axis=1)
        if drive is not None:
            dx = dx + drive(t)
        du = rates * u + x[:, None]
        return np.concatenate((dx[:, None], du), axis=1)

    y0 = np.zeros((n_prob, n_terms + 1), dtype=complex)
    y0[:, 0] = x0
    ys = integrate_linear_ode(y0, rhs, times, opts)
    return ys[:, :, 0].T  # (n_prob, n_times)


def _quadrature_solve(x0, amps, rates, times, opts: SolveOptions, drive):
    """Implicit-trapezoid stepping with trapezoidal memory sums (order 2)."""
    if times.size == 1:
        return x0[:, None].copy()
    dt_out = np.diff(times)
    if not np.allclose(dt_out, dt_out[0], rtol=1e-9, atol=0.0):
        raise ValueError("quadrature method requires a uniform output grid")
    nsub = max(1, int(np.ceil(dt_out[0] / opts.step - 1e-12)))
    h = dt_out[0] / nsub
    n_steps = nsub * (times.size - 1)
    n_prob = x0.shape[0]

    tau = h * np.arange(n_steps + 1)
    kv = np.add.reduce(
        amps[:, :, None] * np.exp(rates[:, :, None] * tau[None, None, :]), axis=1
    )  # (n_prob, n_steps + 1) kernel samples k(j h)
    k0 = kv[:, 0]

    x = np.empty((n_prob, n_steps + 1), dtype=complex)
    x[:, 0] = x0
    f_prev = 0.0 * x0 + (drive(0.0) if drive is not None else 0.0)  # integral is 0 at t=0
    denom = 1.0 + 0.25 * h * h * k0
    for n in range(n_steps):
        # memory sum for t_{n+1}, trapezoid weights, excluding the unknown
        # x_{n+1} endpoint term: h * [ k((n+1)h) x_0 / 2 + sum_{j=1..n} k((n+1-j)h) x_j ]
        s = 0.5 * kv[:, n + 1] * x[:, 0]
        if n >= 1:
            s = s + np.einsum("pj,pj->p", kv[:, n:0:-1], x[:, 1 : n + 1])
        s *= h
        d_next = drive(h * (n + 1)) if drive is not None else 0.0
        x_new = (x[:, n] + 0.5 * h * (f_prev - s + d_next)) / denom
        x[:, n + 1] = x_new
        # completed derivative at t_{n+1}, for the next step
        f_prev = -(s + 0.5 * h * k0 * x_new) + d_next
    if not np.all(np.isfinite(x.view(float))):
        raise NumericsError(f"non-finite values in quadrature solve at step {h:g}")
    return x[:, ::nsub]


def solve_volterra_batch(
    x0,
    amplitudes,
    rates,
    times,
    opts: SolveOptions | None = None,
    drive=None,
) -> np.ndarray:
    """Batched solve of independent scalar Volterra problems.

    ``x0`` has shape (P,), ``amplitudes``/``rates`` shape (P, K).  ``drive``
    is an optional callable t -> scalar or (P,) array.  Returns (P, n_times).
    """
    opts = opts or SolveOptions()
    t = _validate_grid(times)
    x0 = np.asarray(x0, dtype=complex)
    amps = np.asarray(amplitudes, dtype=complex)
    rts = np.asarray(rates, dtype=complex)
    if x0.ndim != 1 or amps.shape != rts.shape or amps.shape[0] != x0.shape[0]:
        raise ValueError("inconsistent batch shapes")
    if t.size == 1:
        return x0[:, None].copy()
    if opts.method == "aux_ode":
        return _aux_ode_solve(x0, amps, rts, t, opts, drive)
    return _quadrature_solve(x0, amps, rts, t, opts, drive)


def solve_volterra(
    x0: complex,
    kernel: KernelSpec,
    times,
    opts: SolveOptions | None = None,
    drive=None,
) -> np.ndarray:
    """Solve a single scalar problem; see :func:`solve_volterra_batch`.

    A constant ``kernel.inhomogeneity`` is used as the drive when no
    explicit ``drive`` callable is given.
    """
    if drive is None and kernel.inhomogeneity is not None:
        c = complex(kernel.inhomogeneity)
        drive = lambda t: c  # noqa: E731
    out = solve_volterra_batch(
        np.array([x0], dtype=complex),
        kernel.amplitudes[None, :],
        kernel.rates[None, :],
        times,
        opts=opts,
        drive=drive,
    )
    return out[0]
