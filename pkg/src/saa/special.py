"""Statistical kernels: regularized incomplete beta, its inverse, binomial
PMF/CDF and Student-t quantiles.

Everything downstream (interval endpoints, sample sizes, order-statistic
positions) is discrete, so the kernels aim for near machine precision rather
than "good enough" approximations. The incomplete beta is evaluated with a
modified-Lentz continued fraction; the prefactor ``x**a (1-x)**b / B(a, b)``
is formed in log space with Stirling corrections for large parameters so that
binomial tails with ``N`` up to ~1e6 neither underflow nor lose accuracy to
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "BinomialSpec",
    "reg_inc_beta",
    "inv_reg_inc_beta",
    "binom_pmf",
    "binom_cdf",
    "binom_sf",
    "student_t_quantile",
]

_EPS = 1e-16
_FPMIN = 1e-300
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_STIRLING_MIN = 10.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of a kernel."""


def check_probability(value: float, name: str = "probability", *, open_: bool = False) -> float:
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{name} is NaN")
    if open_:
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value}")
    elif not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class BinomialSpec:
    """Bin(trials, success_prob)."""

    trials: int
    success_prob: float

    def __post_init__(self) -> None:
        if int(self.trials) != self.trials or self.trials < 0:
            raise DomainError(f"trials must be a nonnegative integer, got {self.trials}")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "success_prob", check_probability(self.success_prob, "success_prob"))


# ---------------------------------------------------------------------------
# log-space prefactor
# ---------------------------------------------------------------------------


def _stirling_corr(x: float) -> float:
    # log Gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], valid for x >= 10
    r = 1.0 / x
    r2 = r * r
    return r * (
        1.0 / 12.0
        - r2 * (1.0 / 360.0
        - r2 * (1.0 / 1260.0
        - r2 * (1.0 / 1680.0
        - r2 * (1.0 / 1188.0
        - r2 * (691.0 / 360360.0
        - r2 * (1.0 / 156.0)))))))


def _rlog1(e: float, log_1pe: float | None = None) -> float:
    """e - log(1 + e), with a series near zero to dodge cancellation.

    ``log_1pe`` may carry an accurately known log(1 + e) for e near -1.
    """
    if abs(e) < 0.05:
        # e^2/2 - e^3/3 + e^4/4 - ...
        term = e * e
        total = 0.0
        k = 2
        while True:
            piece = term / k
            total += piece
            if abs(piece) <= 1e-18 * abs(total):
                break
            term *= -e
            k += 1
        return total
    if log_1pe is None:
        log_1pe = math.log1p(e)
    return e - log_1pe


def _log_pair(x: float, y: float) -> tuple[float, float]:
    # the smaller of x, y = 1 - x is the exactly represented one
    if x <= y:
        return math.log(x), math.log1p(-x)
    return math.log1p(-y), math.log(y)


def _log_front(x: float, y: float, a: float, b: float) -> float:
    """log( x**a * y**b / B(a, b) ) with y = 1 - x supplied separately."""
    if a >= _STIRLING_MIN and b >= _STIRLING_MIN:
        lam = b * x - a * y
        log_x, log_y = _log_pair(x, y)
        s = a + b
        # 1 + lam/a = x s / a and 1 - lam/b = y s / b
        expo = a * _rlog1(lam / a, log_x + math.log(s / a)) + b * _rlog1(-lam / b, log_y + math.log(s / b))
        corr = _stirling_corr(a) + _stirling_corr(b) - _stirling_corr(a + b)
        return 0.5 * math.log(a * b / (a + b)) - _HALF_LOG_2PI - expo - corr
    if b >= _STIRLING_MIN:
        return _log_front_one_large(x, y, a, b)
    if a >= _STIRLING_MIN:
        return _log_front_one_large(y, x, b, a)
    log_x, log_y = _log_pair(x, y)
    return a * log_x + b * log_y + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)


def _log_front_one_large(x: float, y: float, a: float, b: float) -> float:
    # a small, b large: expand log Gamma(a+b) - log Gamma(b) with Stirling
    s = a + b
    log_x, log_y = _log_pair(x, y)
    ratio = (b - 0.5) * math.log1p(a / b) - a + _stirling_corr(s) - _stirling_corr(b)
    return a * (log_x + math.log(s)) + b * log_y + ratio - math.lgamma(a)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    max_iter = 300 + int(20.0 * math.sqrt(max(a, b)))
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _check_shape(a: float, b: float) -> tuple[float, float]:
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0) or math.isinf(a) or math.isinf(b):
        raise DomainError(f"shape parameters must be positive and finite, got a={a}, b={b}")
    return a, b


def _inc_beta_pair(x: float, a: float, b: float) -> tuple[float, float]:
    """Return (I_x(a,b), 1 - I_x(a,b)), each computed without cancellation."""
    if x == 0.0:
        return 0.0, 1.0
    if x == 1.0:
        return 1.0, 0.0
    y = 1.0 - x
    if x < (a + 1.0) / (a + b + 2.0):
        lower = math.exp(_log_front(x, y, a, b)) * _betacf(a, b, x) / a
        return lower, 1.0 - lower
    upper = math.exp(_log_front(y, x, b, a)) * _betacf(b, a, y) / b
    return 1.0 - upper, upper


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    x : float
        Evaluation point in [0, 1].
    a, b : float
        Positive shape parameters.

    Raises
    ------
    DomainError
        If ``a <= 0``, ``b <= 0`` or ``x`` is outside [0, 1].
    """
    a, b = _check_shape(a, b)
    x = check_probability(x, "x")
    value, _ = _inc_beta_pair(x, a, b)
    return min(1.0, max(0.0, value))


def _inc_beta_upper(x: float, a: float, b: float) -> float:
    # 1 - I_x(a, b) without the subtraction when the upper tail is tiny
    _, upper = _inc_beta_pair(x, a, b)
    return min(1.0, max(0.0, upper))


def inv_reg_inc_beta(q: float, a: float, b: float) -> float:
    """Solve ``reg_inc_beta(x, a, b) == q`` for x.

    Safeguarded Newton iteration inside a shrinking bracket; any Newton
    step that leaves the bracket is replaced by bisection, so convergence
    never depends on the starting guess.
    """
    a, b = _check_shape(a, b)
    q = check_probability(q, "q")
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return 1.0

    # Work on whichever tail is smaller so the target keeps full precision.
    lower_tail = q <= 0.5
    target = q if lower_tail else 1.0 - q

    def f(x: float) -> float:
        if lower_tail:
            return reg_inc_beta(x, a, b) - target
        return target - _inc_beta_upper(x, a, b)

    lo, hi = 0.0, 1.0
    x = a / (a + b)
    log_norm = None
    for _ in range(400):
        fx = f(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * _EPS * max(hi, 1e-300):
            break
        y = 1.0 - x
        try:
            log_norm = _log_front(x, y, a, b) - math.log(x) - math.log(y)
            dens = math.exp(log_norm)
        except (ValueError, OverflowError):
            dens = 0.0
        step_ok = False
        if dens > 0.0 and math.isfinite(dens):
            # f is increasing in x for both orientations
            step = fx / dens
            if abs(step) <= 2.0 * _EPS * x:
                return x  # Newton has converged to within float resolution
            x_new = x - step
            if lo < x_new < hi:
                step_ok = True
        if not step_ok:
            if lo > 0.0 and hi / lo > 1e3:
                x_new = math.sqrt(lo * hi)
            elif lo == 0.0 and hi < 1e-3:
                x_new = hi * 1e-3
            else:
                x_new = 0.5 * (lo + hi)
        if x_new == x:
            break
        x = x_new
    return x


# ---------------------------------------------------------------------------
# binomial
# ---------------------------------------------------------------------------


def binom_pmf(spec: BinomialSpec, k: int) -> float:
    """P(Bin(N, p) = k), evaluated in log space."""
    n, p = spec.trials, spec.success_prob
    if int(k) != k or not 0 <= k <= n:
        raise DomainError(f"k must be an integer in [0, {n}], got {k}")
    k = int(k)
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    if n == 0:
        return 1.0
    # C(N,k) p^k q^(N-k) = front(p; k+1, N-k+1) / ((N+1) p q)
    log_pmf = _log_front(p, 1.0 - p, k + 1.0, n - k + 1.0) - math.log(n + 1.0) - math.log(p) - math.log1p(-p)
    return min(1.0, math.exp(log_pmf))


def binom_cdf(spec: BinomialSpec, k: int) -> float:
    """P(Bin(N, p) <= k); clamps to 0 for k < 0 and to 1 for k >= N."""
    n, p = spec.trials, spec.success_prob
    k = math.floor(k)
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    # P(Bin <= k) = I_{1-p}(N-k, k+1)
    return _inc_beta_pair(1.0 - p, n - k, k + 1.0)[0]


def binom_sf(spec: BinomialSpec, k: int) -> float:
    """P(Bin(N, p) >= k), computed directly rather than as 1 - cdf."""
    n, p = spec.trials, spec.success_prob
    k = math.ceil(k)
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    # P(Bin >= k) = I_p(k, N-k+1)
    return _inc_beta_pair(p, float(k), n - k + 1.0)[0]


# ---------------------------------------------------------------------------
# Student t
# ---------------------------------------------------------------------------


def student_t_quantile(q: float, dof: int) -> float:
    """q-quantile of Student's t distribution with ``dof`` degrees of freedom.

    Uses P(|T| > t) = I_{dof/(dof+t^2)}(dof/2, 1/2) and inverts the incomplete
    beta on whichever side of the identity is better conditioned.
    """
    q = check_probability(q, "q", open_=True)
    if int(dof) != dof or dof < 1:
        raise DomainError(f"dof must be a positive integer, got {dof}")
    if q == 0.5:
        return 0.0
    tail = 2.0 * min(q, 1.0 - q)  # two-sided tail mass
    nu = float(dof)
    if tail < 0.5:
        x = inv_reg_inc_beta(tail, 0.5 * nu, 0.5)  # x = nu / (nu + t^2)
        t = math.sqrt(nu * (1.0 / x - 1.0)) if x > 0.0 else math.inf
    else:
        y = inv_reg_inc_beta(1.0 - tail, 0.5, 0.5 * nu)  # y = t^2 / (nu + t^2)
        t = math.sqrt(nu * y / (1.0 - y))
    return t if q > 0.5 else -t
