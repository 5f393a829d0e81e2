"""Hot numeric loops with two interchangeable backends.

Every kernel exists twice: a numba-compiled loop and a vectorized pure-numpy
twin. The active backend is chosen once at import from the FDBF_BACKEND
environment variable:

    auto   (default) numba when importable, numpy otherwise
    numba  require numba, fail at import if missing
    numpy  force the pure-numpy path even when numba is installed

Both backends implement identical arithmetic on complex128 and agree to
float rounding; they differ only in speed. The module-level names
`solve_batch`, `solve_one`, `grid_scan`, `sample_scan` point at the selected
backend; the `*_numpy` / `*_numba` variants stay importable for side-by-side
benchmarks.

Shared conventions: channels enter unnormalized, beamformers are normalized
inside the kernel, downlink gain |h_d^H w|^2 and leakage |a^H w|^2 are
reported for the normalized vector. A projection residual with squared norm
below 1e-24 * ||h_d||^2 counts as zero (the parallel corner).
"""

import math
import os

import numpy as np

_PAR_TOL_SQ = 1e-24  # squared relative parallelism threshold, (1e-12)^2

_requested = os.environ.get("FDBF_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"FDBF_BACKEND must be 'auto', 'numba' or 'numpy', got {_requested!r}")

try:
    from numba import njit
    _NUMBA_OK = True
except ImportError:
    _NUMBA_OK = False
    if _requested == "numba":
        raise

BACKEND = "numba" if (_NUMBA_OK and _requested != "numpy") else "numpy"
HAS_NUMBA = _NUMBA_OK


def _cvec(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


def _cmat(x):
    return np.ascontiguousarray(x, dtype=np.complex128)


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def solve_batch_numpy(h_d, a, eps):
    """Closed-form solve of a batch of instances.

    h_d, a: (n, n_t) complex arrays of downlink channels and effective
    leakage directions; eps: scalar cap. Returns per-instance arrays
    (alpha, si_opt, gain_opt, gain_zf, norm_w, zf_ok). gain_* are squared
    downlink amplitudes of the normalized optimal / zero-forcing vectors;
    zf_ok is False where zero-forcing is degenerate (h_d parallel to a).
    """
    h_d = _cvec(h_d).reshape(len(h_d), -1)
    a = _cvec(a).reshape(len(a), -1)
    hd2 = np.einsum("ij,ij->i", h_d.conj(), h_d).real
    gram = np.einsum("ij,ij->i", a.conj(), a).real
    c = np.einsum("ij,ij->i", a.conj(), h_d)
    mag = c.real ** 2 + c.imag ** 2

    safe_gram = np.where(gram > 0.0, gram, 1.0)
    coef = np.where(gram > 0.0, c / safe_gram, 0.0)
    p = a * coef[:, None]
    q = h_d - p
    q2 = np.einsum("ij,ij->i", q.conj(), q).real

    # active cap: 1 - alpha = min(1, sqrt(eps/(gram-eps)) * ||q||/||p||),
    # the cancellation-free equivalent of sqrt((zeta-eta)/zeta)
    eta = mag - eps * hd2
    active = (eta > 0.0) & (gram > eps)
    den = np.where(active, gram - eps, 1.0)
    safe_mag = np.where(mag > 0.0, mag, 1.0)
    b2 = (eps / den) * (q2 * gram / safe_mag)
    alpha = np.where(active, 1.0 - np.minimum(1.0, np.sqrt(b2)), 0.0)
    w_un = h_d - alpha[:, None] * p

    zf_ok = q2 > _PAR_TOL_SQ * hd2
    cq = np.einsum("ij,ij->i", h_d.conj(), q)
    gain_zf = np.divide(cq.real ** 2 + cq.imag ** 2, q2,
                        out=np.zeros_like(q2), where=zf_ok)

    w2 = np.einsum("ij,ij->i", w_un.conj(), w_un).real
    live = w2 > _PAR_TOL_SQ * hd2
    safe_w2 = np.where(live, w2, 1.0)
    cw = np.einsum("ij,ij->i", h_d.conj(), w_un)
    ca = np.einsum("ij,ij->i", a.conj(), w_un)
    gain_opt = (cw.real ** 2 + cw.imag ** 2) / safe_w2
    si_opt = (ca.real ** 2 + ca.imag ** 2) / safe_w2
    norm_w = np.ones_like(w2)

    if not np.all(live):
        # parallel corner: transmit along h_d at reduced power, leakage on the cap
        dead = ~live
        safe_mag = np.where(mag > 0.0, mag, 1.0)
        gain_opt[dead] = (eps * hd2 * hd2 / safe_mag)[dead]
        si_opt[dead] = eps
        norm_w[dead] = np.sqrt(eps * hd2 / safe_mag)[dead]
    return alpha, si_opt, gain_opt, gain_zf, norm_w, zf_ok


def solve_one_numpy(h_d, H, v, eps):
    """Closed-form solve of a single instance from raw (h_d, H, v, eps).

    Returns (alpha, si_opt, gain_opt, norm_w). Counts the full work of one
    solve including the effective leakage direction a = H^H v.
    """
    a = H.conj().T @ v
    hd2 = np.vdot(h_d, h_d).real
    gram = np.vdot(a, a).real
    cc = np.vdot(a, h_d)
    mag = cc.real ** 2 + cc.imag ** 2
    if gram > 0.0:
        p = a * (cc / gram)
    else:
        p = np.zeros_like(a)
    q = h_d - p
    q2 = np.vdot(q, q).real
    eta = mag - eps * hd2
    if gram == 0.0 or eta <= 0.0 or gram <= eps:
        alpha = 0.0
    else:
        b2 = (eps / (gram - eps)) * (q2 * gram / mag)
        alpha = 1.0 - min(1.0, math.sqrt(b2))
    w_un = h_d - alpha * p
    w2 = np.vdot(w_un, w_un).real
    if w2 <= _PAR_TOL_SQ * hd2:
        return alpha, eps, eps * hd2 * hd2 / mag, math.sqrt(eps * hd2 / mag)
    cw = np.vdot(h_d, w_un)
    ca = np.vdot(a, w_un)
    gain = (cw.real ** 2 + cw.imag ** 2) / w2
    si = (ca.real ** 2 + ca.imag ** 2) / w2
    return alpha, si, gain, 1.0


_GRID_CHUNK = 65536


def grid_scan_numpy(h_d, p, a, eps, n_grid, tol):
    """Exhaustive scan of the one-parameter family on a uniform alpha grid.

    Evaluates w(alpha) ∝ h_d - alpha p at alpha = g/(n_grid-1) and keeps the
    best downlink gain among candidates whose leakage meets eps + tol.
    Returns (best_idx, best_gain, n_feasible, max_violation) where
    max_violation = max(0, si - eps) over accepted candidates and
    best_idx = -1 when no candidate is feasible.
    """
    h_d = _cvec(h_d)
    p = _cvec(p)
    a = _cvec(a)
    denom = float(max(n_grid - 1, 1))
    hd2 = np.vdot(h_d, h_d).real
    best_idx = -1
    best_gain = -1.0
    n_feasible = 0
    max_violation = 0.0
    for start in range(0, n_grid, _GRID_CHUNK):
        idx = np.arange(start, min(start + _GRID_CHUNK, n_grid))
        alphas = idx / denom
        W = h_d[None, :] - alphas[:, None] * p[None, :]
        w2 = np.einsum("ij,ij->i", W.conj(), W).real
        live = w2 > _PAR_TOL_SQ * hd2
        safe_w2 = np.where(live, w2, 1.0)
        ca = W @ a.conj()
        si = (ca.real ** 2 + ca.imag ** 2) / safe_w2
        feas = live & (si <= eps + tol)
        n_here = int(np.count_nonzero(feas))
        if n_here == 0:
            continue
        n_feasible += n_here
        viol = float(np.max(si[feas] - eps))
        if viol > max_violation:
            max_violation = viol
        cw = W @ h_d.conj()
        gain = (cw.real ** 2 + cw.imag ** 2) / safe_w2
        gain[~feas] = -np.inf
        k = int(np.argmax(gain))
        if gain[k] > best_gain:
            best_gain = float(gain[k])
            best_idx = int(idx[k])
    if max_violation < 0.0:
        max_violation = 0.0
    return best_idx, best_gain, n_feasible, max_violation


def sample_scan_numpy(h_d, a, eps, W):
    """Scan arbitrary candidate directions, power-scaled onto the feasible set.

    Each row of W is normalized; rows whose unit-power leakage exceeds eps
    are backed off in power until the leakage sits on the cap. Returns
    (best_idx, best_gain, best_scale, max_violation); best_scale is the norm
    of the winning (possibly backed-off) beamformer.
    """
    h_d = _cvec(h_d)
    a = _cvec(a)
    W = _cvec(W).reshape(len(W), -1)
    w2 = np.einsum("ij,ij->i", W.conj(), W).real
    live = w2 > 0.0
    safe_w2 = np.where(live, w2, 1.0)
    ca = W @ a.conj()
    si_unit = (ca.real ** 2 + ca.imag ** 2) / safe_w2
    scale2 = np.where(si_unit > eps, eps / np.where(si_unit > 0.0, si_unit, 1.0), 1.0)
    cw = W @ h_d.conj()
    gain = scale2 * (cw.real ** 2 + cw.imag ** 2) / safe_w2
    gain[~live] = -np.inf
    if not np.any(live):
        return -1, -1.0, 1.0, 0.0
    viol = scale2 * si_unit - eps
    max_violation = float(max(0.0, np.max(viol[live])))
    k = int(np.argmax(gain))
    return k, float(gain[k]), float(math.sqrt(scale2[k])), max_violation


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if _NUMBA_OK:

    @njit(cache=True, nogil=True)
    def _solve_batch_nb(h_d, a, eps):  # pragma: no cover - replaced by wrapper
        n, nt = h_d.shape
        alpha = np.empty(n)
        si_opt = np.empty(n)
        gain_opt = np.empty(n)
        gain_zf = np.empty(n)
        norm_w = np.empty(n)
        zf_ok = np.empty(n, np.bool_)
        for i in range(n):
            hd2 = 0.0
            gram = 0.0
            cc = 0j
            for j in range(nt):
                hj = h_d[i, j]
                aj = a[i, j]
                hd2 += hj.real * hj.real + hj.imag * hj.imag
                gram += aj.real * aj.real + aj.imag * aj.imag
                cc += aj.conjugate() * hj
            mag = cc.real * cc.real + cc.imag * cc.imag
            if gram > 0.0:
                coef = cc / gram
            else:
                coef = 0j
            q2 = 0.0
            cq = 0j
            for j in range(nt):
                qj = h_d[i, j] - a[i, j] * coef
                q2 += qj.real * qj.real + qj.imag * qj.imag
                cq += h_d[i, j].conjugate() * qj
            # stable active branch: 1 - al = min(1, sqrt(eps/(gram-eps)) ||q||/||p||)
            eta = mag - eps * hd2
            if gram == 0.0 or eta <= 0.0 or gram <= eps:
                al = 0.0
            else:
                b2 = (eps / (gram - eps)) * (q2 * gram / mag)
                al = 1.0 - min(1.0, math.sqrt(b2))
            w2 = 0.0
            cw = 0j
            cab = 0j
            for j in range(nt):
                wj = h_d[i, j] - al * (a[i, j] * coef)
                w2 += wj.real * wj.real + wj.imag * wj.imag
                cw += h_d[i, j].conjugate() * wj
                cab += a[i, j].conjugate() * wj
            ok = q2 > _PAR_TOL_SQ * hd2
            zf_ok[i] = ok
            if ok:
                gain_zf[i] = (cq.real * cq.real + cq.imag * cq.imag) / q2
            else:
                gain_zf[i] = 0.0
            if w2 > _PAR_TOL_SQ * hd2:
                gain_opt[i] = (cw.real * cw.real + cw.imag * cw.imag) / w2
                si_opt[i] = (cab.real * cab.real + cab.imag * cab.imag) / w2
                norm_w[i] = 1.0
            else:
                gain_opt[i] = eps * hd2 * hd2 / mag
                si_opt[i] = eps
                norm_w[i] = math.sqrt(eps * hd2 / mag)
            alpha[i] = al
        return alpha, si_opt, gain_opt, gain_zf, norm_w, zf_ok

    @njit(cache=True, nogil=True)
    def _solve_one_nb(h_d, H, v, eps):  # pragma: no cover - replaced by wrapper
        nr, nt = H.shape
        a = np.empty(nt, np.complex128)
        for j in range(nt):
            s = 0j
            for r in range(nr):
                s += H[r, j].conjugate() * v[r]
            a[j] = s
        hd2 = 0.0
        gram = 0.0
        cc = 0j
        for j in range(nt):
            hj = h_d[j]
            aj = a[j]
            hd2 += hj.real * hj.real + hj.imag * hj.imag
            gram += aj.real * aj.real + aj.imag * aj.imag
            cc += aj.conjugate() * hj
        mag = cc.real * cc.real + cc.imag * cc.imag
        if gram > 0.0:
            coef = cc / gram
        else:
            coef = 0j
        q2 = 0.0
        for j in range(nt):
            qj = h_d[j] - a[j] * coef
            q2 += qj.real * qj.real + qj.imag * qj.imag
        eta = mag - eps * hd2
        if gram == 0.0 or eta <= 0.0 or gram <= eps:
            al = 0.0
        else:
            b2 = (eps / (gram - eps)) * (q2 * gram / mag)
            al = 1.0 - min(1.0, math.sqrt(b2))
        w2 = 0.0
        cw = 0j
        cab = 0j
        for j in range(nt):
            wj = h_d[j] - al * (a[j] * coef)
            w2 += wj.real * wj.real + wj.imag * wj.imag
            cw += h_d[j].conjugate() * wj
            cab += a[j].conjugate() * wj
        if w2 <= _PAR_TOL_SQ * hd2:
            return al, eps, eps * hd2 * hd2 / mag, math.sqrt(eps * hd2 / mag)
        gain = (cw.real * cw.real + cw.imag * cw.imag) / w2
        si = (cab.real * cab.real + cab.imag * cab.imag) / w2
        return al, si, gain, 1.0

    @njit(cache=True, nogil=True)
    def _grid_scan_nb(h_d, p, a, eps, n_grid, tol):  # pragma: no cover
        nt = h_d.shape[0]
        hd2 = 0.0
        for j in range(nt):
            hd2 += h_d[j].real * h_d[j].real + h_d[j].imag * h_d[j].imag
        denom = float(max(n_grid - 1, 1))
        best_idx = -1
        best_gain = -1.0
        n_feasible = 0
        max_violation = 0.0
        for g in range(n_grid):
            al = g / denom
            w2 = 0.0
            cw = 0j
            ca = 0j
            for j in range(nt):
                wj = h_d[j] - al * p[j]
                w2 += wj.real * wj.real + wj.imag * wj.imag
                cw += h_d[j].conjugate() * wj
                ca += a[j].conjugate() * wj
            if w2 <= _PAR_TOL_SQ * hd2:
                continue
            si = (ca.real * ca.real + ca.imag * ca.imag) / w2
            if si <= eps + tol:
                n_feasible += 1
                viol = si - eps
                if viol > max_violation:
                    max_violation = viol
                gain = (cw.real * cw.real + cw.imag * cw.imag) / w2
                if gain > best_gain:
                    best_gain = gain
                    best_idx = g
        return best_idx, best_gain, n_feasible, max_violation

    @njit(cache=True, nogil=True)
    def _sample_scan_nb(h_d, a, eps, W):  # pragma: no cover
        m, nt = W.shape
        best_idx = -1
        best_gain = -1.0
        best_scale = 1.0
        max_violation = 0.0
        for i in range(m):
            w2 = 0.0
            cw = 0j
            ca = 0j
            for j in range(nt):
                wj = W[i, j]
                w2 += wj.real * wj.real + wj.imag * wj.imag
                cw += h_d[j].conjugate() * wj
                ca += a[j].conjugate() * wj
            if w2 == 0.0:
                continue
            si_unit = (ca.real * ca.real + ca.imag * ca.imag) / w2
            if si_unit > eps:
                scale2 = eps / si_unit
            else:
                scale2 = 1.0
            gain = scale2 * (cw.real * cw.real + cw.imag * cw.imag) / w2
            viol = scale2 * si_unit - eps
            if viol > max_violation:
                max_violation = viol
            if gain > best_gain:
                best_gain = gain
                best_idx = i
                best_scale = math.sqrt(scale2)
        return best_idx, best_gain, best_scale, max_violation

    def solve_batch_numba(h_d, a, eps):
        h_d = _cvec(h_d).reshape(len(h_d), -1)
        a = _cvec(a).reshape(len(a), -1)
        return _solve_batch_nb(h_d, a, float(eps))

    def solve_one_numba(h_d, H, v, eps):
        return _solve_one_nb(_cvec(h_d), _cmat(H), _cvec(v), float(eps))

    def grid_scan_numba(h_d, p, a, eps, n_grid, tol):
        return _grid_scan_nb(_cvec(h_d), _cvec(p), _cvec(a), float(eps),
                             int(n_grid), float(tol))

    def sample_scan_numba(h_d, a, eps, W):
        W = _cvec(W).reshape(len(W), -1)
        return _sample_scan_nb(_cvec(h_d), _cvec(a), float(eps), W)

else:
    solve_batch_numba = None
    solve_one_numba = None
    grid_scan_numba = None
    sample_scan_numba = None


if BACKEND == "numba":
    solve_batch = solve_batch_numba
    solve_one = solve_one_numba
    grid_scan = grid_scan_numba
    sample_scan = sample_scan_numba
else:
    solve_batch = solve_batch_numpy
    solve_one = solve_one_numpy
    grid_scan = grid_scan_numpy
    sample_scan = sample_scan_numpy


def warmup():
    """Trigger JIT compilation of all kernels on tiny inputs.

    No-op on the numpy backend. Call before timing anything.
    """
    h = np.array([[1.0 + 0j, 0.5j]])
    a = np.array([[0.3 + 0j, 0.1j]])
    solve_batch(h, a, 0.5)
    solve_one(h[0], np.array([[1.0 + 0j, 0j]]), np.array([1.0 + 0j]), 0.5)
    grid_scan(h[0], a[0], a[0], 0.5, 3, 1e-12)
    sample_scan(h[0], a[0], 0.5, h)
