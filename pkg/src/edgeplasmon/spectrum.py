"""Zeros of the symbol: quadratic roots xi^+-, splitting coefficients C^+-,
the bulk-SPP zero census on both Riemann sheets, and the winding index.

The index nu_K is the winding number of P(xi) along the real axis.  The
census counts zeros of P on the first sheet (N^+/N^- by half-plane) and on
the second sheet (N*^+/N*^-); the two are conjecturally related by
nu_K = (N^+ - N^-)/2 + (N*^+ - N*^-)/2.
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from .branches import Sheet, sign_q
from .conductivity import ConductivityTensor
from .kernel import Problem, Variant, p_of_xi

__all__ = [
    "AssignmentRule",
    "ConjectureResult",
    "DegenerateQuadraticError",
    "DoubleRootError",
    "HalfPlane",
    "QuadraticRoots",
    "RealAxisZeroError",
    "SpectrumReport",
    "SplitCoefficients",
    "ZeroRecord",
    "bulk_zeros",
    "conjecture_check",
    "dual_winding_index",
    "problem_scale",
    "quadratic_roots",
    "split_coefficients",
    "unwrapped_phase_grid",
    "winding_index",
]

# |Im xi| below this (relative to |xi|) means the root pair sits on the real
# axis and the half-plane assignment falls back to the sign of Re.
IM_TIE_BAND = 1e-9

REAL_AXIS_MIN_MODULUS = 1e-8

MARGINAL_BAND = 1e-8
CLASSIFY_RESIDUAL = 1e-6


class DegenerateQuadraticError(ValueError):
    """sigma_xx = 0: the formulation requires a nondegenerate quadratic."""


class DoubleRootError(ValueError):
    """Discriminant root D = 0: xi^+ = xi^- and the splitting is singular."""


class RealAxisZeroError(ValueError):
    """The symbol vanishes on the integration contour; index undefined."""


class AssignmentRule(enum.Enum):
    """How the xi^+/xi^- labels were decided.

    BY_IM: xi^+ is the upper-half-plane root.  This is the generic rule:
    Q_+ is evaluated at xi^+ and is analytic in the upper half-plane, and
    the x > 0 residue calculus closes around xi^+ there.  (The sign of
    Re xi alone does not label the roots: both can share a Re sign.)
    BY_RE is the fallback when both roots sit on the real axis within the
    tie band.
    """

    BY_IM = "by-im"
    BY_RE = "by-re"


@dataclasses.dataclass(frozen=True)
class QuadraticRoots:
    """Roots of sigma_xx xi^2 + (sigma_xy+sigma_yx) q xi + sigma_yy q^2.

    ``disc`` is the discriminant root actually used by the assignment; the
    C^+- coefficients must be built from this same value so the
    (xi^+, C^+) pairing stays consistent.
    """

    xi_plus: complex
    xi_minus: complex
    disc: complex
    rule: AssignmentRule


@dataclasses.dataclass(frozen=True)
class SplitCoefficients:
    c_plus: complex
    c_minus: complex


def quadratic_roots(sigma: ConductivityTensor, q: complex) -> QuadraticRoots:
    """xi^+- with a deterministic half-plane assignment.

    xi^+- = -q[(s_xy+s_yx) +- sg(q) D]/(2 s_xx),
    D = sqrt((s_xy+s_yx)^2 - 4 s_xx s_yy).

    The branch of D is fixed by requiring Im xi^+ > 0 > Im xi^-; only when
    both roots are within IM_TIE_BAND of the real axis does the sign of Re
    decide instead.  A branch flip of D swaps the labels and is recorded
    through ``disc``.
    """
    q = complex(q)
    sg = sign_q(q)
    sxx = complex(sigma.xx)
    if sxx == 0:
        raise DegenerateQuadraticError(
            "degenerate quadratic; formulation requires sigma_xx != 0")
    s_plus = complex(sigma.off_sum)
    disc = np.sqrt(complex(s_plus * s_plus - 4.0 * sxx * complex(sigma.yy)))
    disc = complex(disc)
    if disc == 0:
        raise DoubleRootError("coincident roots xi^+ = xi^-; splitting singular")

    def pair(d):
        return (-q * (s_plus + sg * d) / (2.0 * sxx),
                -q * (s_plus - sg * d) / (2.0 * sxx))

    xp, xm = pair(disc)
    scale = max(abs(xp), abs(xm))
    if abs(xp.imag) <= IM_TIE_BAND * scale and abs(xm.imag) <= IM_TIE_BAND * scale:
        rule = AssignmentRule.BY_RE
        if xp.real < xm.real:
            disc = -disc
            xp, xm = pair(disc)
        if not xp.real > xm.real:
            raise DoubleRootError("roots not separable by Re or Im sign")
    else:
        rule = AssignmentRule.BY_IM
        if xp.imag < xm.imag:
            disc = -disc
            xp, xm = pair(disc)
    return QuadraticRoots(xi_plus=xp, xi_minus=xm, disc=disc, rule=rule)


def split_coefficients(sigma: ConductivityTensor, q: complex) -> SplitCoefficients:
    """C^+- = (1/2){1 +- sg(q) (s_xy - s_yx)/D}, D-branch coupled to xi^+-.

    C^- is computed as 1 - C^+ so the pair sums to one exactly in floating
    point.
    """
    roots = quadratic_roots(sigma, q)
    t = sign_q(q) * complex(sigma.off_diff) / roots.disc
    c_plus = 0.5 * (1.0 + t)
    return SplitCoefficients(c_plus=c_plus, c_minus=1.0 - c_plus)


# ---------------------------------------------------------------------------
# Winding index
# ---------------------------------------------------------------------------


def _roots_or_none(sigma: ConductivityTensor, q: complex):
    try:
        return quadratic_roots(sigma, q)
    except (DegenerateQuadraticError, DoubleRootError):
        return None


def problem_scale(problem: Problem) -> float:
    """Characteristic wavenumber scale: max of |q|, |xi^+-|, |k_sp|, 1."""
    scale = max(abs(problem.q), 1.0)
    sides = problem.sides() if problem.variant is Variant.TWO_SHEET else (problem,)
    for prob in sides:
        sig = prob.sigma_eff
        if sig.frobenius == 0:
            continue
        r = _roots_or_none(sig, prob.q)
        if r is not None:
            scale = max(scale, abs(r.xi_plus), abs(r.xi_minus))
        if sig.xx != 0:
            scale = max(scale, abs(2j / sig.xx))
    return scale


def unwrapped_phase_grid(
    pfun,
    m: float,
    scale: float,
    *,
    max_step_rad: float = 0.5 * math.pi,
    max_nodes: int = 400_000,
):
    """Sample arg of ``pfun`` on [-m, m], continuously unwrapped.

    ``pfun`` must be vectorized over a real array.  The grid is refined
    until adjacent phase steps are below ``max_step_rad``, which both makes
    np.unwrap exact and lets callers pin log branches by interpolation.
    Returns (nodes, unwrapped_phase, values_at_nodes).
    """
    inner = np.linspace(-4.0 * scale, 4.0 * scale, 1601)
    outer = np.geomspace(4.0 * scale, m, 200)
    xs = np.unique(np.concatenate([-outer[::-1], inner, outer]))
    while True:
        vals = pfun(xs)
        mod = np.abs(vals)
        if mod.min() < REAL_AXIS_MIN_MODULUS:
            raise RealAxisZeroError(
                f"symbol modulus {mod.min():.3e} on the real axis; "
                "index/splitting undefined (zero on contour)")
        ang = np.unwrap(np.angle(vals))
        steps = np.abs(np.diff(ang))
        bad = steps > max_step_rad
        # refine through sharp modulus dips too, where the phase turns fastest
        bad |= np.abs(np.diff(np.log(mod))) > 0.7
        if not bad.any():
            break
        if xs.size > max_nodes:
            raise RealAxisZeroError(
                "phase refinement diverged; symbol too close to a real-axis zero")
        mids = 0.5 * (xs[:-1][bad] + xs[1:][bad])
        xs = np.unique(np.concatenate([xs, mids]))
    return xs, ang, vals


def _winding_from_problem(problem: Problem, sheet: Sheet) -> int:
    scale = problem_scale(problem)
    m = 100.0 * scale

    def pfun(x):
        return p_of_xi(problem, x, sheet)

    xs, ang, _ = unwrapped_phase_grid(pfun, m, scale)
    turns = (ang[-1] - ang[0]) / (2.0 * math.pi)
    nu = round(turns)
    if abs(turns - nu) > 0.2:
        raise RealAxisZeroError(
            f"phase change {turns:.3f} turns is not close to an integer; "
            "tail not converged or symbol near a real-axis zero")
    return int(nu)


def winding_index(problem: Problem) -> int:
    """Krein index: winding number of P(xi) (the ratio P^R/P^L for two sheets)."""
    return _winding_from_problem(problem, Sheet.FIRST)


def dual_winding_index(problem: Problem) -> int:
    """Winding of the second-sheet (dual) symbol P*."""
    return _winding_from_problem(problem, Sheet.SECOND)


# ---------------------------------------------------------------------------
# Bulk-SPP zero census
# ---------------------------------------------------------------------------


class HalfPlane(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclasses.dataclass(frozen=True)
class ZeroRecord:
    location: complex
    sheet: Sheet
    half_plane: HalfPlane
    marginal: bool
    residual: float


@dataclasses.dataclass(frozen=True)
class SpectrumReport:
    zeros: tuple[ZeroRecord, ...]
    n_plus: int
    n_minus: int
    n_star_plus: int
    n_star_minus: int
    n_marginal: int

    @property
    def conjecture_rhs(self) -> float:
        return (0.5 * (self.n_plus - self.n_minus)
                + 0.5 * (self.n_star_plus - self.n_star_minus))

    def counts(self) -> tuple[int, int, int, int]:
        return (self.n_plus, self.n_minus, self.n_star_plus, self.n_star_minus)

    def upper_first_sheet(self) -> tuple[ZeroRecord, ...]:
        return tuple(z for z in self.zeros
                     if z.sheet is Sheet.FIRST and z.half_plane is HalfPlane.UPPER
                     and not z.marginal)


def bulk_zeros(problem: Problem) -> SpectrumReport:
    """Census of the zeros of P (first sheet) and P* (second sheet).

    Clearing the square root from P = 0 gives the quartic
    N_eff(xi)^2 + 4 (xi^2 + q^2) = 0 whose roots are exactly the zeros of
    P * P*; each root is attributed to a sheet by back-substitution.
    Roots within MARGINAL_BAND of the real axis or of the branch points
    +-iq are flagged marginal and excluded from the counts.
    """
    if problem.variant is Variant.TWO_SHEET:
        raise ValueError("two-sheet census applies per side; use problem.sides()")
    q = complex(problem.q)
    a, b, c = problem.quad_coeffs()
    if a == 0 and b == 0 and c == 0:
        return SpectrumReport(zeros=(), n_plus=0, n_minus=0,
                              n_star_plus=0, n_star_minus=0, n_marginal=0)
    if a == 0:
        raise DegenerateQuadraticError(
            "degenerate quadratic; formulation requires sigma_xx != 0")
    # (a xi^2 + b xi + c)^2 + 4 xi^2 + 4 q^2, degree 4 in xi
    coeffs = np.array([
        a * a,
        2.0 * a * b,
        b * b + 2.0 * a * c + 4.0,
        2.0 * b * c,
        c * c + 4.0 * q * q,
    ], dtype=complex)
    roots = np.roots(coeffs)

    records: list[ZeroRecord] = []
    counts = {(Sheet.FIRST, HalfPlane.UPPER): 0, (Sheet.FIRST, HalfPlane.LOWER): 0,
              (Sheet.SECOND, HalfPlane.UPPER): 0, (Sheet.SECOND, HalfPlane.LOWER): 0}
    n_marginal = 0
    for root in roots:
        r = complex(root)
        scale = max(abs(r), 1.0)
        marginal = abs(r.imag) < MARGINAL_BAND * scale
        for bp in (1j * q, -1j * q):
            marginal = marginal or abs(r - bp) < MARGINAL_BAND * scale
        if marginal:
            n_marginal += 1
            records.append(ZeroRecord(r, Sheet.FIRST, HalfPlane.UPPER, True, math.nan))
            continue
        res1 = abs(p_of_xi(problem, r, Sheet.FIRST))
        res2 = abs(p_of_xi(problem, r, Sheet.SECOND))
        sheet = Sheet.FIRST if res1 <= res2 else Sheet.SECOND
        residual = min(res1, res2)
        if residual > CLASSIFY_RESIDUAL:
            # a sound quartic root always satisfies one sheet; treat numerical
            # failures as marginal rather than miscounting
            n_marginal += 1
            records.append(ZeroRecord(r, sheet, HalfPlane.UPPER, True, residual))
            continue
        half = HalfPlane.UPPER if r.imag > 0 else HalfPlane.LOWER
        counts[(sheet, half)] += 1
        records.append(ZeroRecord(r, sheet, half, False, residual))

    return SpectrumReport(
        zeros=tuple(records),
        n_plus=counts[(Sheet.FIRST, HalfPlane.UPPER)],
        n_minus=counts[(Sheet.FIRST, HalfPlane.LOWER)],
        n_star_plus=counts[(Sheet.SECOND, HalfPlane.UPPER)],
        n_star_minus=counts[(Sheet.SECOND, HalfPlane.LOWER)],
        n_marginal=n_marginal,
    )


@dataclasses.dataclass(frozen=True)
class ConjectureResult:
    nu_k: int
    rhs: float
    agrees: bool | None  # None when marginal zeros make the census indeterminate
    report: SpectrumReport


def conjecture_check(problem: Problem) -> ConjectureResult:
    """Compare the winding index against the half-integer census combination."""
    nu = winding_index(problem)
    if problem.variant is Variant.TWO_SHEET:
        left, right = problem.sides()
        rep_l = bulk_zeros(left) if left.sigma.frobenius else None
        report = bulk_zeros(right)
        rhs = report.conjecture_rhs - (rep_l.conjecture_rhs if rep_l else 0.0)
        marginal = report.n_marginal + (rep_l.n_marginal if rep_l else 0)
    else:
        report = bulk_zeros(problem)
        rhs = report.conjecture_rhs
        marginal = report.n_marginal
    agrees: bool | None = (rhs == nu)
    if marginal:
        agrees = None
    return ConjectureResult(nu_k=nu, rhs=rhs, agrees=agrees, report=report)
