"""Airy functions, the Airy kernel, and the continuum edge model operator.

Evaluation is dual-regime.  Near the origin the Maclaurin series of the two
standard solutions f, g of w'' = z*w are summed in double-double arithmetic,
which keeps full double accuracy through the cancellation region (the series
loses about lg(e^{2*xi}) bits in plain doubles, xi = (2/3)|z|^{3/2}).  Beyond
the series radius the Poincare asymptotic expansions are used with a fixed
term count near the optimal truncation point, and the two regimes are blended
smoothly over a short window so residual checks built on finite differences
see no jump.  Bi and Ci grow like exp(+xi); for those a scaled
(mantissa, log-scale) representation is available so resolvent products can
cancel exponents before exponentiating.

Ci is defined as i*Ai - Bi.  That sign makes the pair (Ai, Ci) satisfy
Ai'*Ci - Ai*Ci' = 1/pi and makes Ci the solution that decays to the left of
the spectrum for Im(zeta) > 0, which is what the resolvent kernel requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# ---------------------------------------------------------------------------
# double-double helpers (vectorized error-free transforms)
# ---------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _dd_add(x, y):
    s, e = _two_sum(x[0], y[0])
    e = e + x[1] + y[1]
    return _quick_two_sum(s, e)


def _dd_mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e = e + x[0] * y[1] + x[1] * y[0]
    return _quick_two_sum(p, e)


def _dd_div_d(x, d):
    q = x[0] / d
    p, e = _two_prod(q, d)
    r = ((x[0] - p) - e + x[1]) / d
    return _quick_two_sum(q, r)


def _dd_neg(x):
    return -x[0], -x[1]


# Ai(0), Ai'(0), sqrt(3) as double-double constants.
_AI0 = (0.3550280538878172, 2.05233632436212e-17)
_AIP0 = (-0.2588194037928068, 2.522243111610832e-17)
_SQRT3 = (1.7320508075688772, 1.0035084221806903e-16)

_SERIES_RADIUS = 8.5        # double-double series, real axis
_BLEND_WIDTH = 0.5
_SERIES_RADIUS_CPLX = 12.0  # double-double series off the axis
_WEDGE_RADIUS = 14.0        # series reach inside the anti-Stokes wedge
_WEDGE_LO = math.pi / 3 - 0.25
_WEDGE_HI = 2 * math.pi / 3 + 0.25
_RAISE_LO = math.pi / 3 - 0.05   # beyond the wedge radius this cone is
_RAISE_HI = 2 * math.pi / 3 + 0.05  # out of reach of double precision
_N_ASYM = 24                # fixed asymptotic term count (smooth truncation)
_MAX_ARG = 1.0e4

_INV_2SQRTPI = 0.5 / math.sqrt(math.pi)
_INV_SQRTPI = 1.0 / math.sqrt(math.pi)


def _asym_uv():
    u = np.empty(_N_ASYM + 1)
    v = np.empty(_N_ASYM + 1)
    u[0] = v[0] = 1.0
    for k in range(_N_ASYM):
        u[k + 1] = u[k] * (6 * k + 5) * (6 * k + 1) / (72.0 * (k + 1))
        v[k + 1] = u[k + 1] * (6 * (k + 1) + 1) / (1.0 - 6 * (k + 1))
    return u, v


_UK, _VK = _asym_uv()


# ---------------------------------------------------------------------------
# series regime
# ---------------------------------------------------------------------------

def _series_real(x):
    """Ai, Ai', Bi, Bi' on real x by double-double Maclaurin summation."""
    x = np.asarray(x, dtype=float)
    zero = np.zeros_like(x)
    x2 = _two_prod(x, x)
    x3 = _dd_mul(x2, (x, zero))

    f = tf = (np.ones_like(x), zero)
    g = tg = (x, zero)
    fp = tfp = _dd_div_d(x2, 2.0)
    gp = tgp = (np.ones_like(x), zero)
    for k in range(60):
        tf = _dd_div_d(_dd_mul(tf, x3), float((3 * k + 2) * (3 * k + 3)))
        tg = _dd_div_d(_dd_mul(tg, x3), float((3 * k + 3) * (3 * k + 4)))
        tfp = _dd_div_d(_dd_mul(tfp, x3), float((3 * k + 3) * (3 * k + 5)))
        tgp = _dd_div_d(_dd_mul(tgp, x3), float((3 * k + 1) * (3 * k + 3)))
        f = _dd_add(f, tf)
        g = _dd_add(g, tg)
        fp = _dd_add(fp, tfp)
        gp = _dd_add(gp, tgp)

    def comb(cf, cg, a, b):
        r = _dd_add(_dd_mul(cf, a), _dd_mul(cg, b))
        return r[0] + r[1]

    ai = comb(_AI0, _AIP0, f, g)
    aip = comb(_AI0, _AIP0, fp, gp)
    bi = _dd_mul(_SQRT3, _dd_add(_dd_mul(_AI0, f), _dd_neg(_dd_mul(_AIP0, g))))
    bip = _dd_mul(_SQRT3, _dd_add(_dd_mul(_AI0, fp), _dd_neg(_dd_mul(_AIP0, gp))))
    bi = bi[0] + bi[1]
    bip = bip[0] + bip[1]
    # real argument: Ai, Bi real, so i*Ai - Bi never cancels
    return ai, aip, bi, bip, 1j * ai - bi, 1j * aip - bip


def _cdd_add(x, y):
    return _dd_add(x[0], y[0]), _dd_add(x[1], y[1])


def _cdd_mul(x, y):
    (xr, xi), (yr, yi) = x, y
    rr = _dd_add(_dd_mul(xr, yr), _dd_neg(_dd_mul(xi, yi)))
    ri = _dd_add(_dd_mul(xr, yi), _dd_mul(xi, yr))
    return rr, ri


def _cdd_div_d(x, d):
    return _dd_div_d(x[0], d), _dd_div_d(x[1], d)


def _series_complex(z):
    """Maclaurin series off the real axis, double-double in re/im parts."""
    z = np.asarray(z, dtype=complex)
    zero = np.zeros(z.shape)
    one = np.ones(z.shape)
    zr = (z.real.astype(float), zero)
    zi = (z.imag.astype(float), zero)
    zc = (zr, zi)
    z2 = _cdd_mul(zc, zc)
    z3 = _cdd_mul(z2, zc)

    f = tf = ((one, zero), (zero, zero))
    g = tg = zc
    fp = tfp = _cdd_div_d(z2, 2.0)
    gp = tgp = ((one, zero), (zero, zero))
    for k in range(120):
        tf = _cdd_div_d(_cdd_mul(tf, z3), float((3 * k + 2) * (3 * k + 3)))
        tg = _cdd_div_d(_cdd_mul(tg, z3), float((3 * k + 3) * (3 * k + 4)))
        tfp = _cdd_div_d(_cdd_mul(tfp, z3), float((3 * k + 3) * (3 * k + 5)))
        tgp = _cdd_div_d(_cdd_mul(tgp, z3), float((3 * k + 1) * (3 * k + 3)))
        f = _cdd_add(f, tf)
        g = _cdd_add(g, tg)
        fp = _cdd_add(fp, tfp)
        gp = _cdd_add(gp, tgp)

    def comb(cf, cg, a, b):
        """Complex-dd linear combination cf*a + cg*b, rounded to complex."""
        r = _cdd_add(_cdd_mul(cf, a), _cdd_mul(cg, b))
        return (r[0][0] + r[0][1]) + 1j * (r[1][0] + r[1][1])

    def const(re_dd, im_dd):
        return (re_dd, im_dd)

    dd0 = (0.0, 0.0)
    c_ai_f = const(_AI0, dd0)
    c_ai_g = const(_AIP0, dd0)
    s3a0 = _dd_mul(_SQRT3, _AI0)
    s3a1 = _dd_mul(_SQRT3, _AIP0)
    c_bi_f = const(s3a0, dd0)
    c_bi_g = const(_dd_neg(s3a1), dd0)
    # Ci = i*Ai - Bi combined inside double-double to avoid mode cancellation
    c_ci_f = const(_dd_neg(s3a0), _AI0)
    c_ci_g = const(s3a1, _AIP0)

    ai = comb(c_ai_f, c_ai_g, f, g)
    aip = comb(c_ai_f, c_ai_g, fp, gp)
    bi = comb(c_bi_f, c_bi_g, f, g)
    bip = comb(c_bi_f, c_bi_g, fp, gp)
    ci = comb(c_ci_f, c_ci_g, f, g)
    cip = comb(c_ci_f, c_ci_g, fp, gp)
    return ai, aip, bi, bip, ci, cip


# ---------------------------------------------------------------------------
# asymptotic regime (scaled)
# ---------------------------------------------------------------------------

def _asym_right(z):
    """Expansion for arg z near 0.  Returns (mantissa, log-scale) per function.

    Ai carries scale -Re(xi), Bi carries +Re(xi), xi = (2/3) z^{3/2}.
    """
    z = np.asarray(z, dtype=complex)
    rz = np.sqrt(z)
    z14 = np.sqrt(rz)
    xi = (2.0 / 3.0) * z * rz
    inv = 1.0 / xi
    su_alt = np.zeros_like(z)
    sv_alt = np.zeros_like(z)
    su = np.zeros_like(z)
    sv = np.zeros_like(z)
    for k in range(_N_ASYM, -1, -1):
        sign = -1.0 if k % 2 else 1.0
        su_alt = su_alt * inv + sign * _UK[k]
        sv_alt = sv_alt * inv + sign * _VK[k]
        su = su * inv + _UK[k]
        sv = sv * inv + _VK[k]
    osc = np.exp(-1j * xi.imag)
    ai = (_INV_2SQRTPI / z14) * su_alt * osc
    aip = -(_INV_2SQRTPI * z14) * sv_alt * osc
    bi = (_INV_SQRTPI / z14) * su / osc
    bip = (_INV_SQRTPI * z14) * sv / osc
    re_xi = xi.real
    # Ci = i Ai - Bi at the Bi scale; the Ai mode is exponentially subdominant
    # here (arg z well inside the right sector), so no cancellation occurs
    damp = np.exp(-2.0 * np.abs(re_xi))
    ci = 1j * ai * damp - bi
    cip = 1j * aip * damp - bip
    return ((ai, -re_xi), (aip, -re_xi), (bi, re_xi), (bip, re_xi),
            (ci, re_xi), (cip, re_xi))


def _asym_left(z):
    """Expansion for arg z near pi, via t = -z.  Scale is |Im chi|."""
    t = -np.asarray(z, dtype=complex)
    rt = np.sqrt(t)
    t14 = np.sqrt(rt)
    xi = (2.0 / 3.0) * t * rt
    chi = xi + 0.25 * math.pi
    inv2 = 1.0 / (xi * xi)
    p = np.zeros_like(t)
    r = np.zeros_like(t)
    for k in range(_N_ASYM // 2, -1, -1):
        sign = -1.0 if k % 2 else 1.0
        p = p * inv2 + sign * _UK[2 * k]
        r = r * inv2 + sign * _VK[2 * k]
    q = np.zeros_like(t)
    s = np.zeros_like(t)
    for k in range((_N_ASYM - 1) // 2, -1, -1):
        sign = -1.0 if k % 2 else 1.0
        q = q * inv2 + sign * _UK[2 * k + 1]
        s = s * inv2 + sign * _VK[2 * k + 1]
    q = q / xi
    s = s / xi

    m = chi.imag
    scale = np.abs(m)
    eplus = np.exp(1j * chi.real - (m + scale))   # e^{i chi} * e^{-scale}
    eminus = np.exp(-1j * chi.real + (m - scale))  # e^{-i chi} * e^{-scale}
    sin_t = (eplus - eminus) / 2j
    cos_t = (eplus + eminus) / 2.0
    ai = (_INV_SQRTPI / t14) * (sin_t * p - cos_t * q)
    aip = -(_INV_SQRTPI * t14) * (cos_t * r + sin_t * s)
    bi = (_INV_SQRTPI / t14) * (cos_t * p + sin_t * q)
    bip = (_INV_SQRTPI * t14) * (sin_t * r - cos_t * s)
    # Ci is the pure e^{-i chi} mode; build it directly so the dominant
    # e^{+i chi} parts of Ai and Bi never have to cancel numerically
    em = np.exp(-1j * chi.real)
    ci = -(_INV_SQRTPI / t14) * em * (p + 1j * q)
    cip = (_INV_SQRTPI * t14) * em * (s - 1j * r)
    return ((ai, scale), (aip, scale), (bi, scale), (bip, scale),
            (ci, m), (cip, m))


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _airy_scaled_all(z):
    """Vectorized (mantissa, log-scale) pairs for Ai, Ai', Bi, Bi', Ci, Ci'."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z) > _MAX_ARG):
        raise ValueError(f"argument magnitude exceeds supported range {_MAX_ARG:g}")
    mant = [np.zeros_like(z) for _ in range(6)]
    scale = [np.zeros(z.shape) for _ in range(6)]

    is_real = z.imag == 0.0

    def put(mask, vals):
        for slot, (m, s) in enumerate(vals):
            mant[slot][mask] = m
            scale[slot][mask] = np.real(s)

    # real axis
    xr = z.real
    m_ser = is_real & (np.abs(xr) <= _SERIES_RADIUS)
    if np.any(m_ser):
        vals = _series_real(xr[m_ser])
        put(m_ser, [(v, np.zeros(np.shape(v))) for v in vals])
    m_blend = is_real & (np.abs(xr) > _SERIES_RADIUS) & \
        (np.abs(xr) < _SERIES_RADIUS + _BLEND_WIDTH)
    if np.any(m_blend):
        x = xr[m_blend]
        w = _smoothstep((np.abs(x) - _SERIES_RADIUS) / _BLEND_WIDTH)
        ser = _series_real(x)
        right = x >= 0
        asy = [np.empty(x.shape, dtype=complex) for _ in range(6)]
        if np.any(right):
            av = _asym_right(x[right].astype(complex))
            for slot in range(6):
                asy[slot][right] = av[slot][0] * np.exp(av[slot][1])
        if np.any(~right):
            av = _asym_left(x[~right].astype(complex))
            for slot in range(6):
                asy[slot][~right] = av[slot][0] * np.exp(av[slot][1])
        blended = []
        for slot in range(6):
            sv = ser[slot]
            if slot < 4:
                val = (1 - w) * np.real(sv) + w * np.real(asy[slot])
            else:
                val = (1 - w) * sv + w * asy[slot]
            blended.append((val, np.zeros(x.shape)))
        put(m_blend, blended)
    m_asym_r = is_real & (xr >= _SERIES_RADIUS + _BLEND_WIDTH)
    if np.any(m_asym_r):
        put(m_asym_r, _asym_right(z[m_asym_r]))
    m_asym_l = is_real & (xr <= -(_SERIES_RADIUS + _BLEND_WIDTH))
    if np.any(m_asym_l):
        put(m_asym_l, _asym_left(z[m_asym_l]))

    # off the real axis
    cplx = ~is_real
    if np.any(cplx):
        absz = np.abs(z)
        argz = np.abs(np.angle(z))
        wedge = (argz > _WEDGE_LO) & (argz < _WEDGE_HI)
        m_cser = cplx & ((absz <= _SERIES_RADIUS_CPLX) |
                         (wedge & (absz <= _WEDGE_RADIUS)))
        if np.any(m_cser):
            vals = _series_complex(z[m_cser])
            put(m_cser, [(v, np.zeros(v.shape)) for v in vals])
        rest = cplx & ~m_cser
        deep_wedge = (argz > _RAISE_LO) & (argz < _RAISE_HI)
        if np.any(rest & deep_wedge):
            raise ValueError(
                "argument in the anti-Stokes wedge beyond the supported "
                f"radius {_WEDGE_RADIUS:g}; evaluation there needs resummation")
        m_r = rest & (argz <= 0.5 * math.pi)
        if np.any(m_r):
            put(m_r, _asym_right(z[m_r]))
        m_l = rest & (argz > 0.5 * math.pi)
        if np.any(m_l):
            put(m_l, _asym_left(z[m_l]))

    return [(mant[i], scale[i]) for i in range(6)]


# ---------------------------------------------------------------------------
# public evaluation API
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledValue:
    """value = mantissa * exp(log_scale); keeps Bi/Ci finite at large argument."""
    mantissa: complex
    log_scale: float

    @property
    def value(self) -> complex:
        return self.mantissa * np.exp(self.log_scale)


_WHICH = {"Ai": 0, "Bi": 2, "Ci": 4}


def airy_eval_scaled(z, which: str = "Ai", order: int = 0) -> ScaledValue:
    """Scaled evaluation of Ai/Bi/Ci or the first derivative at a point."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if which not in _WHICH:
        raise ValueError(f"unknown function {which!r}")
    vals = _airy_scaled_all(z)
    m, s = vals[_WHICH[which] + order]
    return ScaledValue(complex(m[0]), float(s[0]))


def airy_eval(z, which: str = "Ai", order: int = 0):
    """Ai, Bi, or Ci (= i*Ai - Bi), or the derivative with order=1.

    Real input returns a float for Ai/Bi and complex for Ci; Bi/Ci overflow
    to inf for very large positive argument, use airy_eval_scaled there.
    """
    sv = airy_eval_scaled(z, which, order)
    val = sv.value
    if np.ndim(z) == 0 and np.isrealobj(np.asarray(z)) and which != "Ci":
        return float(np.real(val))
    return val


def airy_all(x):
    """(Ai, Ai', Bi, Bi') as plain arrays over real or complex x."""
    x = np.asarray(x)
    vals = _airy_scaled_all(x)[:4]
    out = [m * np.exp(s) for m, s in vals]
    if np.isrealobj(x):
        out = [np.real(v) for v in out]
    if x.ndim == 0:
        return tuple(o[0] for o in out)
    return tuple(o.reshape(x.shape) for o in out)


def airy_ai(x, order: int = 0):
    """Vectorized Ai or Ai' over real arrays (plain, unscaled)."""
    vals = airy_all(x)
    return vals[order]


# ---------------------------------------------------------------------------
# Airy kernel and limiting edge density
# ---------------------------------------------------------------------------

_DIAG_CUTOFF = 1.0e-4


def airy_kernel(t1, t2):
    """(Ai(t1)Ai'(t2) - Ai'(t1)Ai(t2)) / (t1 - t2), diagonal-safe.

    Pairs closer than 1e-4 are routed through the Taylor form around the
    midpoint, whose leading term is the diagonal value Ai'(t)^2 - t Ai(t)^2.
    """
    shape = np.broadcast(np.asarray(t1), np.asarray(t2)).shape
    scalar = shape == ()
    x = np.broadcast_to(np.asarray(t1, dtype=float), shape).ravel()
    y = np.broadcast_to(np.asarray(t2, dtype=float), shape).ravel()
    out = np.empty(x.shape)
    d = x - y
    near = np.abs(d) < _DIAG_CUTOFF
    far = ~near
    if np.any(far):
        a1, ap1, _, _ = airy_all(x[far])
        a2, ap2, _, _ = airy_all(y[far])
        out[far] = (a1 * ap2 - ap1 * a2) / d[far]
    if np.any(near):
        m = 0.5 * (x[near] + y[near])
        h = 0.5 * d[near]
        a, ap, _, _ = airy_all(m)
        diag = ap * ap - m * a * a
        curv = (2.0 * m * ap * ap - 2.0 * m * m * a * a + a * ap) / 3.0
        out[near] = diag + h * h * curv
    if scalar:
        return float(out[0])
    return out.reshape(shape)


def airy_kernel_matrix(t) -> np.ndarray:
    """Airy-kernel Gram matrix on a set of points, one Ai evaluation per node.

    Same values as airy_kernel on all pairs, assembled from outer products;
    this is what quadrature discretizations should call.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a, ap, _, _ = airy_all(t)
    diff = np.subtract.outer(t, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (np.outer(a, ap) - np.outer(ap, a)) / diff
    near = np.abs(diff) < _DIAG_CUTOFF
    if np.any(near):
        ii, jj = np.nonzero(near)
        m = 0.5 * (t[ii] + t[jj])
        h = 0.5 * (t[ii] - t[jj])
        am, apm, _, _ = airy_all(m)
        diag = apm * apm - m * am * am
        curv = (2.0 * m * apm * apm - 2.0 * m * m * am * am + am * apm) / 3.0
        k[ii, jj] = diag + h * h * curv
    return 0.5 * (k + k.T)


def edge_density(s):
    """Limiting mean eigenvalue density at the edge: Ai'(s)^2 - s Ai(s)^2."""
    s = np.asarray(s, dtype=float)
    a, ap, _, _ = airy_all(s)
    out = ap * ap - s * a * a
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# continuum model operator and its resolvent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelOperator:
    """Edge model operator  ahalf * d^2/dx^2 - slope * x  on the line.

    ``slope`` is the full coefficient of x (2c for the single-interval case).
    ``orientation`` = -1 represents the mirrored operator ahalf*d^2 + slope*x
    (the inner endpoint of a two-interval support); its kernel is evaluated by
    reflecting both arguments.  ``lattice_offset`` and ``sign_mode`` carry the
    decorations of the two-interval rescaled matrices.
    """

    ahalf: float
    slope: float
    endpoint: float = 0.0
    orientation: int = 1
    lattice_offset: float = 0.0
    sign_mode: str = "none"   # none | parity | quarter
    kappa: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        if self.ahalf <= 0 or self.slope <= 0:
            raise ValueError("operator coefficients must be positive")
        object.__setattr__(self, "kappa", (self.slope / self.ahalf) ** (1.0 / 3.0))
        object.__setattr__(self, "gamma", (self.ahalf * self.slope ** 2) ** (-1.0 / 3.0))


def continuum_resolvent(op: ModelOperator, zeta: complex, x, y):
    """Kernel of (A - zeta)^{-1}: (pi/(kappa*ahalf)) * Ci(X_min) Ai(X_max).

    X = kappa*x + gamma*zeta.  Requires Im(zeta) != 0; the lower half-plane
    is handled by conjugation of the real-coefficient operator.
    """
    if zeta.imag == 0.0:
        raise ValueError("resolvent requires Im(zeta) != 0")
    if zeta.imag < 0.0:
        return np.conj(continuum_resolvent(op, np.conj(zeta), x, y))
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if op.orientation < 0:
        x, y = -x, -y
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    pref = math.pi / (op.kappa * op.ahalf)
    x_lo = op.kappa * lo + op.gamma * zeta
    x_hi = op.kappa * hi + op.gamma * zeta
    ci_m, ci_s = _airy_scaled_all(x_lo)[4]
    ai_m, ai_s = _airy_scaled_all(x_hi)[0]
    out = pref * ci_m * ai_m * np.exp(ci_s + ai_s)
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return complex(out[0])
    return out.reshape(np.broadcast(x, y).shape)


def rescaled_resolvent_matrix(op: ModelOperator, n: int, zeta: complex,
                              offsets) -> np.ndarray:
    """Lattice matrix n^{1/3} R_zeta at arguments (j + parity offset)/n^{1/3}.

    ``offsets`` are the integers j in row/column index l = n - j.  The
    two-interval decorations (alternating argument offset, quarter-period
    sign factors) and the left-edge (-1)^{l1+l2} flip are applied according
    to op.lattice_offset, op.sign_mode and op.orientation group conventions.
    """
    if zeta.imag == 0.0:
        raise ValueError("resolvent requires Im(zeta) != 0")
    if zeta.imag < 0.0:
        return np.conj(rescaled_resolvent_matrix(op, n, np.conj(zeta), offsets))
    j = np.asarray(offsets, dtype=int)
    scale = float(n) ** (1.0 / 3.0)
    x = j / scale
    if op.lattice_offset != 0.0:
        x = x + ((-1.0) ** np.abs(j)) * op.lattice_offset / scale
    xs = -x if op.orientation < 0 else x
    order = np.argsort(xs)
    xs_sorted = xs[order]
    arg = op.kappa * xs_sorted + op.gamma * zeta
    vals = _airy_scaled_all(arg)
    ai_m, ai_s = vals[0]
    ci_m, ci_s = vals[4]
    pref = math.pi / (op.kappa * op.ahalf)
    # R[i,j] = pref * Ci(min) * Ai(max) over the sorted grid
    mant = np.outer(ci_m, ai_m)
    expo = np.add.outer(ci_s, ai_s)
    upper = pref * mant * np.exp(expo)
    mat_sorted = np.triu(upper) + np.tril(upper.T, -1)
    inv = np.argsort(order)
    mat = mat_sorted[np.ix_(inv, inv)]
    mat = scale * mat

    if op.sign_mode == "parity":
        sgn = (-1.0) ** np.abs(j)
        mat = -np.outer(sgn, sgn) * mat
    elif op.sign_mode == "quarter":
        sgn = (-1.0) ** ((np.abs(j) + 1) // 2)
        mat = np.outer(sgn, sgn) * mat
    elif op.sign_mode != "none":
        raise ValueError(f"unknown sign_mode {op.sign_mode!r}")
    return mat


def wronskian_ai_ci(x):
    """Ai'(x)Ci(x) - Ai(x)Ci'(x); identically 1/pi for the chosen Ci sign."""
    vals = _airy_scaled_all(x)
    ai, ais = vals[0]
    aip, aips = vals[1]
    ci, cis = vals[4]
    cip, cips = vals[5]
    w = aip * ci * np.exp(aips + cis) - ai * cip * np.exp(ais + cips)
    if np.ndim(x) == 0:
        return complex(w[0])
    return w.reshape(np.shape(x))


__all__ = [
    "ScaledValue", "airy_eval", "airy_eval_scaled", "airy_all", "airy_ai",
    "airy_kernel", "edge_density", "ModelOperator", "continuum_resolvent",
    "rescaled_resolvent_matrix", "wronskian_ai_ci",
]
