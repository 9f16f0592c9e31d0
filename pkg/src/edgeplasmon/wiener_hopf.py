"""Additive Wiener-Hopf factorization of the log-symbol.

For a zero-index symbol, ln P(xi) splits as Q_+(xi) + Q_-(xi) with

    Q_+-(xi) = +- (1/2 pi i) Int ln P(xi') / (xi' - xi) dxi'     (+- Im xi > 0),

so both split functions are values of the same Cauchy transform
Phi(xi0) = (1/2 pi i) Int L(xi')/(xi'-xi0) dxi' of the continuously
unwrapped log L = ln|P| + i arg P:  Q_+ = Phi above the axis and
Q_- = -Phi below it.  The branch of L is pinned by continuous unwrapping
along the real axis plus the requirement that L match the principal
large-xi form (ln of i*sigma_xx*xi/2 for a single sheet), which is what
makes the dispersion-relation logarithms land on the branch the edge
condition needs.

The transform is evaluated two ways: a pointwise adaptive form used by
``split_q`` (linear subtraction of L near the pole, exact closed forms for
the subtracted part, tail folded to a finite interval), and a reusable
fixed-node table (``CauchyTable``) for batch evaluations along shifted
contours (field profiles, boundary-factorization sweeps).
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from .branches import Sheet, principal_log
from .kernel import Problem, Variant, p_of_xi
from .quadrature import adaptive_gk, gk_nodes_weights
from .spectrum import (
    problem_scale,
    quadratic_roots,
    split_coefficients,
    unwrapped_phase_grid,
)

__all__ = [
    "NonzeroIndexError",
    "SplitHalf",
    "SplitValue",
    "UnwrappedLogKernel",
    "boundary_split_q",
    "build_log_kernel",
    "cauchy_transform",
    "lambda_pm",
    "q_asymptotic",
    "split_q",
]

TWO_PI = 2.0 * math.pi


class NonzeroIndexError(RuntimeError):
    """Symbol has nonzero winding index: ln P is not single valued as a loop."""

    def __init__(self, nu_k: int):
        super().__init__(
            f"nu_K = {nu_k} != 0: the additive factorization does not apply; "
            "use the index classification instead")
        self.nu_k = nu_k


class SplitHalf(enum.Enum):
    PLUS = "+"
    MINUS = "-"


@dataclasses.dataclass(frozen=True)
class SplitValue:
    value: complex
    half: SplitHalf
    eval_point: complex
    quadrature_error_estimate: float


class UnwrappedLogKernel:
    """Continuously unwrapped ln P along the real axis.

    Stores an adaptive phase grid on [-m, m] (steps < pi/2) from which the
    2-pi branch of arg P at any real point is recovered by interpolation;
    moduli and principal phases are always evaluated exactly from the
    symbol, so quadrature accuracy is not limited by the grid.
    """

    def __init__(self, problem: Problem, grid: np.ndarray, phase: np.ndarray,
                 m_cutoff: float, scale: float, nu_k: int,
                 tail_power: int, tail_const: complex, trivial: bool = False):
        self.problem = problem
        self.grid = grid
        self.phase = phase
        self.m_cutoff = m_cutoff
        self.scale = scale
        self.nu_k = nu_k
        self.tail_power = tail_power      # L ~ tail_power*ln(zeta) + tail_const
        self.tail_const = tail_const
        self.trivial = trivial
        self._cache: dict = {}

    # -- symbol evaluations on (a neighborhood of) the real axis --------

    def p_on_axis(self, zeta):
        return p_of_xi(self.problem, zeta, Sheet.FIRST)

    def dlog_on_axis(self, zeta):
        """d/dzeta ln P(zeta): single valued, no unwrap needed."""
        prob = self.problem
        if self.trivial:
            return np.zeros_like(np.asarray(zeta, dtype=complex))
        if prob.variant is Variant.TWO_SHEET:
            left, right = prob.sides()
            out = 0.0
            if right.sigma.frobenius:
                out = _dlogp_single(right, zeta)
            if left.sigma.frobenius:
                out = out - _dlogp_single(left, zeta)
            return out
        return _dlogp_single(prob, zeta)

    def phase_at(self, zeta):
        """Unwrapped arg P at real zeta (grid-pinned; tail-pinned beyond m)."""
        zeta = np.asarray(zeta, dtype=float)
        if self.trivial:
            return np.zeros_like(zeta)
        pa = np.angle(self.p_on_axis(zeta))
        ref = np.interp(zeta, self.grid, self.phase,
                        left=self.phase[0], right=self.phase[-1])
        n = np.round((ref - pa) / TWO_PI)
        out = pa + TWO_PI * n
        return out[()] if out.ndim == 0 else out

    def log_values(self, zeta):
        """L(zeta) = ln|P| + i * (unwrapped arg P), vectorized over real zeta."""
        zeta = np.asarray(zeta, dtype=float)
        if self.trivial:
            return np.zeros(zeta.shape, dtype=complex)
        vals = self.p_on_axis(zeta)
        pa = np.angle(vals)
        ref = np.interp(zeta, self.grid, self.phase,
                        left=self.phase[0], right=self.phase[-1])
        n = np.round((ref - pa) / TWO_PI)
        out = np.log(np.abs(vals)) + 1j * (pa + TWO_PI * n)
        return out[()] if out.ndim == 0 else out

    @property
    def base_value(self) -> complex:
        """L at xi = 0."""
        return complex(self.log_values(np.array([0.0]))[0])

    # -- memoized derived objects ---------------------------------------

    def root_constants(self):
        """(roots, coeffs, phi_plus, phi_minus) at xi^+-, computed once."""
        key = "root_constants"
        if key not in self._cache:
            if self.nu_k != 0:
                raise NonzeroIndexError(self.nu_k)
            roots = quadratic_roots(self.problem.sigma, self.problem.q)
            coeffs = split_coefficients(self.problem.sigma, self.problem.q)
            phi_p = cauchy_transform(self, roots.xi_plus)
            phi_m = cauchy_transform(self, roots.xi_minus)
            self._cache[key] = (roots, coeffs, phi_p, phi_m)
        return self._cache[key]

    def cauchy_table(self, max_panel_width: float | None = None) -> "CauchyTable":
        key = ("table", max_panel_width)
        if key not in self._cache:
            self._cache[key] = CauchyTable.build(self, max_panel_width=max_panel_width)
        return self._cache[key]


def _dlogp_single(problem: Problem, zeta):
    """P'/P for a single-sheet symbol, first Riemann sheet."""
    zeta = np.asarray(zeta, dtype=complex)
    q = complex(problem.q)
    a, b, c = problem.quad_coeffs()
    w2 = zeta * zeta + q * q
    w = np.sqrt(np.where(w2.imag == 0.0, w2.real.astype(complex), w2))
    flip = (w.real == 0.0) & (w.imag < 0.0)
    w = np.where(flip, -w, w)
    num = a * zeta * zeta + b * zeta + c
    dnum = 2.0 * a * zeta + b
    p = 1.0 + 0.5j * num / w
    dp = 0.5j * (dnum - num * zeta / w2) / w
    return dp / p


def _tail_model(problem: Problem) -> tuple[int, complex]:
    """(power p, constant) of the large-zeta law L ~ p ln zeta + constant."""
    if problem.variant is Variant.TWO_SHEET:
        left, right = problem.sides()
        lz = left.sigma.frobenius == 0
        rz = right.sigma.frobenius == 0
        if lz and rz:
            return 0, 0.0 + 0.0j
        if lz:
            return 1, complex(principal_log(0.5j * right.sigma_eff.xx))
        if rz:
            return -1, -complex(principal_log(0.5j * left.sigma_eff.xx))
        lxx, rxx = left.sigma_eff.xx, right.sigma_eff.xx
        if lxx == 0 or rxx == 0:
            raise ValueError("two-sheet tail undefined: a nonzero side has sigma_xx = 0")
        return 0, complex(principal_log(rxx / lxx))
    sxx = problem.sigma_eff.xx
    if problem.sigma.frobenius == 0:
        return 0, 0.0 + 0.0j
    if sxx == 0:
        raise ValueError("sigma_xx = 0: symbol does not follow the ln(kappa xi) tail law")
    return 1, complex(principal_log(0.5j * sxx))


def build_log_kernel(problem: Problem, *, m_factor: float = 100.0) -> UnwrappedLogKernel:
    """Construct the unwrapped log-symbol for one (sheet, q) configuration.

    The phase is unwrapped continuously on [-m, m] with m = m_factor times
    the problem scale, then the global 2-pi-i branch constant is fixed by
    matching L(m) + L(-m) against the analytic tail law.  The winding
    index is a byproduct and is stored on the kernel.
    """
    scale = problem_scale(problem)
    m = m_factor * scale
    tail_power, tail_const = _tail_model(problem)

    if problem.variant is not Variant.TWO_SHEET and problem.sigma.frobenius == 0:
        grid = np.array([-m, 0.0, m])
        return UnwrappedLogKernel(problem, grid, np.zeros(3), m, scale, 0,
                                  tail_power, tail_const, trivial=True)

    def pfun(x):
        return p_of_xi(problem, x, Sheet.FIRST)

    xs, theta, vals = unwrapped_phase_grid(pfun, m, scale)

    turns = (theta[-1] - theta[0]) / TWO_PI
    nu = round(turns)
    if abs(turns - nu) > 0.2:
        raise RuntimeError(
            f"phase change {turns:.3f} turns not close to an integer; "
            "unwrapping unreliable (symbol near a real-axis zero?)")

    # fix the global branch against the right tail alone: arg P(m) must
    # approach Im tail_const (mod 2 pi); this stays well defined for
    # nonzero winding, where the two tails differ by 2 pi nu
    drift = theta[-1] - tail_const.imag
    k = round(drift / TWO_PI)
    if abs(drift - TWO_PI * k) > 1.0:
        raise RuntimeError(
            f"failed to close the phase normalization (tail drift {drift:.3f} "
            "rad); increase m_factor or check the symbol tails")
    theta = theta - TWO_PI * k

    return UnwrappedLogKernel(problem, xs, theta, m, scale, int(nu),
                              tail_power, tail_const)


# ---------------------------------------------------------------------------
# Cauchy transform of L: pointwise adaptive evaluation
# ---------------------------------------------------------------------------


def _span_for(kernel: UnwrappedLogKernel, xi0: complex) -> float:
    return max(64.0 * kernel.scale, 4.0 * abs(xi0))


def _closed_log_term(span: float, xi0: complex):
    """Int_{-span}^{span} dz/(z - xi0), continuous for xi0 off the axis;
    principal-value result for xi0 exactly on the axis."""
    if xi0.imag != 0.0:
        return complex(np.log(span - xi0) - np.log(-span - xi0))
    x = xi0.real
    return complex(math.log(abs(span - x)) - math.log(abs(-span - x)))


def _tail_integrand(kernel: UnwrappedLogKernel, span: float, xi0: complex):
    """Folded tail |zeta| > span mapped to u in (0, 1] via zeta = span/u."""

    def h(u):
        u = np.asarray(u, dtype=float)
        zeta = span / u
        lp = kernel.log_values(zeta)
        lm = kernel.log_values(-zeta)
        num = zeta * (lp - lm) + xi0 * (lp + lm)
        return num / (zeta * zeta - xi0 * xi0) * (span / (u * u))

    return h


def cauchy_transform(kernel: UnwrappedLogKernel, xi0: complex,
                     *, rtol: float = 1e-11) -> SplitValue:
    """Phi(xi0) = (1/2 pi i) Int L(z)/(z - xi0) dz over the real axis.

    Q_+(xi0) = Phi(xi0) for Im xi0 > 0 and Q_-(xi0) = -Phi(xi0) for
    Im xi0 < 0.  On the axis the principal-value transform is returned
    (used by the Plemelj boundary formulas).  L is subtracted linearly
    about t0 = Re xi0 so near-axis points (boundary-value probes, low-loss
    roots) cost no more than well-separated ones.
    """
    if kernel.trivial:
        return SplitValue(0.0 + 0.0j, SplitHalf.PLUS, complex(xi0), 0.0)
    xi0 = complex(xi0)
    span = _span_for(kernel, xi0)
    t0 = float(np.clip(xi0.real, -0.75 * span, 0.75 * span))
    c0 = complex(kernel.log_values(np.array([t0]))[0])
    c1 = complex(kernel.dlog_on_axis(np.array([t0 + 0.0j]))[0])

    def g(z):
        z = np.asarray(z, dtype=float)
        lv = kernel.log_values(z)
        return (lv - c0 - c1 * (z - t0)) / (z - xi0)

    seeds = sorted({s for s in (
        -4.0 * kernel.scale, -kernel.scale, 0.0, kernel.scale, 4.0 * kernel.scale,
        t0 - kernel.scale, t0 - 0.1 * kernel.scale, t0,
        t0 + 0.1 * kernel.scale, t0 + kernel.scale,
        xi0.real) if -span < s < span})
    main = adaptive_gk(g, -span, span, rtol=rtol, atol=1e-14,
                       initial=np.array(seeds))

    log_term = _closed_log_term(span, xi0)
    closed = c0 * log_term + c1 * (2.0 * span + (xi0 - t0) * log_term)

    tail = adaptive_gk(_tail_integrand(kernel, span, xi0), 0.0, 1.0,
                       rtol=rtol, atol=1e-14,
                       initial=np.geomspace(1e-10, 0.5, 12))

    value = (main.value + closed + tail.value) / (2j * math.pi)
    err = (main.error + tail.error) / TWO_PI
    half = SplitHalf.PLUS if xi0.imag >= 0 else SplitHalf.MINUS
    return SplitValue(complex(value), half, xi0, float(err))


def split_q(kernel: UnwrappedLogKernel, xi0: complex, half: SplitHalf,
            *, rtol: float = 1e-11) -> SplitValue:
    """Split-function value Q_+(xi0) or Q_-(xi0) by Cauchy quadrature.

    PLUS requires Im xi0 > 0 and MINUS requires Im xi0 < 0 (each split
    function is evaluated in its own half-plane of analyticity); points on
    the axis are directed to ``boundary_split_q``.
    """
    if kernel.nu_k != 0:
        raise NonzeroIndexError(kernel.nu_k)
    xi0 = complex(xi0)
    if xi0.imag == 0.0:
        raise ValueError(
            "evaluation point on the real axis; use boundary_split_q for "
            "Plemelj boundary values")
    if half is SplitHalf.PLUS and xi0.imag < 0:
        raise ValueError("Q_+ is evaluated in the upper half-plane (Im xi0 > 0)")
    if half is SplitHalf.MINUS and xi0.imag > 0:
        raise ValueError("Q_- is evaluated in the lower half-plane (Im xi0 < 0)")
    phi = cauchy_transform(kernel, xi0, rtol=rtol)
    sign = 1.0 if half is SplitHalf.PLUS else -1.0
    return SplitValue(sign * phi.value, half, xi0, phi.quadrature_error_estimate)


def boundary_split_q(kernel: UnwrappedLogKernel, x: float, half: SplitHalf,
                     *, rtol: float = 1e-11) -> SplitValue:
    """Plemelj boundary value on the real axis:

    Q_+-(x -+/+ i0) = L(x)/2 +- (1/2 pi i) PV Int L(z)/(z - x) dz.
    """
    if kernel.nu_k != 0:
        raise NonzeroIndexError(kernel.nu_k)
    x = float(x)
    pv = cauchy_transform(kernel, complex(x), rtol=rtol)
    half_l = 0.5 * complex(kernel.log_values(np.array([x]))[0])
    sign = 1.0 if half is SplitHalf.PLUS else -1.0
    return SplitValue(half_l + sign * pv.value, half, complex(x),
                      pv.quadrature_error_estimate)


def q_asymptotic(problem: Problem, xi: complex, half: SplitHalf) -> complex:
    """Leading large-xi law: Q_+(xi) ~ (1/2) ln(sigma_xx xi / 2) and
    Q_-(xi) ~ (1/2) ln(-sigma_xx xi / 2) (nondimensional units)."""
    sxx = problem.sigma_eff.xx
    if sxx == 0:
        raise ValueError("sigma_xx = 0: no logarithmic tail")
    arg = 0.5 * sxx * complex(xi)
    if half is SplitHalf.MINUS:
        arg = -arg
    return 0.5 * complex(principal_log(arg))


# ---------------------------------------------------------------------------
# Lambda splitting
# ---------------------------------------------------------------------------

_ROOT_SERIES_BAND = 1e-6


def _phi_derivative(kernel: UnwrappedLogKernel, xi0: complex, *, rtol=1e-10) -> complex:
    h = 1e-5 * kernel.scale
    a = cauchy_transform(kernel, xi0 + h, rtol=rtol).value
    b = cauchy_transform(kernel, xi0 - h, rtol=rtol).value
    return (a - b) / (2.0 * h)


def lambda_pm(problem: Problem, kernel: UnwrappedLogKernel, xi: complex,
              half: SplitHalf, *, rtol: float = 1e-10) -> complex:
    """The splitting functions

    Lambda_+(xi) = -C+ [e^{-Q+(xi)} - e^{-Q+(xi+)}]/(xi - xi+)
                   + C- [e^{Q-(xi-)} - e^{-Q+(xi)}]/(xi - xi-),
    Lambda_-(xi) = +C- [e^{Q-(xi)} - e^{Q-(xi-)}]/(xi - xi-)
                   - C+ [e^{-Q+(xi+)} - e^{Q-(xi)}]/(xi - xi+),

    with removable singularities at xi = xi^+- handled by a series limit.
    Natural half-plane evaluation uses e^{-+Q_+-(xi)} = e^{-Phi(xi)}; on
    the opposite side (needed only within a thin strip, e.g. boundary
    probes at xi -+ i delta) the analytic continuation across the axis is
    e^{-Q+} -> e^{-Phi}/P and e^{Q-} -> P e^{-Phi}, P being single valued.
    """
    xi = complex(xi)
    roots, coeffs, phi_p, phi_m = kernel.root_constants()
    xp, xm = roots.xi_plus, roots.xi_minus
    cp, cm = coeffs.c_plus, coeffs.c_minus
    a = np.exp(-phi_p.value)   # e^{-Q_+(xi^+)}
    b = np.exp(-phi_m.value)   # e^{+Q_-(xi^-)}

    if xi.imag == 0.0:
        raise ValueError("Lambda evaluation needs an off-axis point; shift by "
                         "+-i*delta for boundary probes")
    natural_upper = xi.imag > 0

    phi = cauchy_transform(kernel, xi, rtol=rtol).value
    e_phi = np.exp(-phi)
    if half is SplitHalf.PLUS:
        # f = e^{-Q_+(xi)} continued across the axis if needed
        f = e_phi if natural_upper else e_phi / p_of_xi(problem, xi, Sheet.FIRST)
        if abs(xi - xp) < _ROOT_SERIES_BAND * kernel.scale:
            term_p = cp * _phi_derivative(kernel, xp) * a
        else:
            term_p = -cp * (f - a) / (xi - xp)
        term_m = cm * (b - f) / (xi - xm)
        return complex(term_p + term_m)
    # f = e^{+Q_-(xi)}
    f = e_phi if not natural_upper else e_phi * p_of_xi(problem, xi, Sheet.FIRST)
    if abs(xi - xm) < _ROOT_SERIES_BAND * kernel.scale:
        # d/dxi e^{Q_-} at xi^-: Q_-' = -Phi'
        term_m = cm * (-_phi_derivative(kernel, xm)) * b
    else:
        term_m = cm * (f - b) / (xi - xm)
    term_p = -cp * (a - f) / (xi - xp)
    return complex(term_m + term_p)


# ---------------------------------------------------------------------------
# Batched Cauchy transform on fixed nodes
# ---------------------------------------------------------------------------


class CauchyTable:
    """Fixed discretization of the Cauchy transform for batch evaluation.

    Same subtraction scheme as ``cauchy_transform`` but with nodes built
    once per kernel: a panelized main interval [-span, span] plus folded
    log-spaced tail nodes.  Accuracy is validated in the test suite
    against the pointwise adaptive route.
    """

    def __init__(self, kernel, span, nodes, weights, lvals,
                 tail_z, tail_w, tail_lp, tail_lm):
        self.kernel = kernel
        self.span = span
        self.nodes = nodes
        self.weights = weights
        self.lvals = lvals
        self.tail_z = tail_z
        self.tail_w = tail_w
        self.tail_lp = tail_lp
        self.tail_lm = tail_lm

    @classmethod
    def build(cls, kernel: UnwrappedLogKernel, *, span: float | None = None,
              max_panel_width: float | None = None) -> "CauchyTable":
        scale = kernel.scale
        span = span or 64.0 * scale
        width = scale / 24.0
        if max_panel_width is not None:
            width = min(width, max_panel_width)
        inner_edge = 8.0 * scale
        n_inner = int(np.ceil(2.0 * inner_edge / width))
        edges = [np.linspace(-inner_edge, inner_edge, n_inner + 1)]
        # geometric panels out to the span on both sides
        grow = inner_edge
        right = [inner_edge]
        while grow < span:
            grow = min(grow * 1.2, span)
            right.append(grow)
        right = np.asarray(right)
        edges = np.unique(np.concatenate([-right[::-1], edges[0], right]))

        nodes_list, w_list = [], []
        for a, b_ in zip(edges[:-1], edges[1:]):
            n, w = gk_nodes_weights(a, b_)
            nodes_list.append(n)
            w_list.append(w)
        nodes = np.concatenate(nodes_list)
        weights = np.concatenate(w_list)
        lvals = kernel.log_values(nodes)

        # folded tail: zeta = span/u on dyadic u-panels down to u ~ 1e-12
        u_edges = 2.0 ** -np.arange(0, 41, dtype=float)
        tz_list, tw_list = [], []
        for hi, lo in zip(u_edges[:-1], u_edges[1:]):
            n, w = gk_nodes_weights(lo, hi)
            tz_list.append(n)
            tw_list.append(w)
        u_nodes = np.concatenate(tz_list)
        u_w = np.concatenate(tw_list)
        tail_z = span / u_nodes
        tail_w = u_w * span / (u_nodes * u_nodes)
        tail_lp = kernel.log_values(tail_z)
        tail_lm = kernel.log_values(-tail_z)
        return cls(kernel, span, nodes, weights, lvals,
                   tail_z, tail_w, tail_lp, tail_lm)

    def phi(self, xi0, chunk: int = 512) -> np.ndarray:
        """Phi at a batch of off-axis points (PV on the axis), vectorized.

        Valid while Re xi0 stays inside ~3/4 of the table span, where the
        pole subtraction is anchored; use ``cauchy_transform`` for far
        points (it sizes its own interval).
        """
        xi0 = np.atleast_1d(np.asarray(xi0, dtype=complex))
        out = np.empty(xi0.shape, dtype=complex)
        kernel = self.kernel
        if kernel.trivial:
            out[:] = 0.0
            return out
        span = self.span
        far = np.abs(xi0.real) > 0.78 * span
        if far.any() and np.any(np.abs(xi0.imag[far]) < np.abs(xi0.real[far])):
            raise ValueError(
                "CauchyTable.phi: near-axis point beyond 3/4 of the table "
                "span; enlarge the table or use cauchy_transform")
        t0 = np.clip(xi0.real, -0.75 * span, 0.75 * span)
        c0 = kernel.log_values(t0)
        c1 = kernel.dlog_on_axis(t0.astype(complex))
        on_axis = xi0.imag == 0.0
        log_term = np.where(
            on_axis,
            np.log(np.abs(span - xi0.real)) - np.log(np.abs(span + xi0.real)),
            np.log(np.where(on_axis, 1.0, span - xi0))
            - np.log(np.where(on_axis, 1.0, -span - xi0)),
        )
        closed = c0 * log_term + c1 * (2.0 * span + (xi0 - t0) * log_term)

        for start in range(0, xi0.size, chunk):
            sl = slice(start, min(start + chunk, xi0.size))
            z = xi0[sl][:, None]
            tt = t0[sl][:, None]
            num = self.lvals[None, :] - c0[sl][:, None] - c1[sl][:, None] * (self.nodes[None, :] - tt)
            main = (num / (self.nodes[None, :] - z) * self.weights[None, :]).sum(axis=1)
            tnum = (self.tail_z[None, :] * (self.tail_lp - self.tail_lm)[None, :]
                    + z * (self.tail_lp + self.tail_lm)[None, :])
            tail = (tnum / (self.tail_z[None, :] ** 2 - z * z)
                    * self.tail_w[None, :]).sum(axis=1)
            out[sl] = (main + closed[sl] + tail) / (2j * math.pi)
        return out
