# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled 2-D sweep kernel.

Covers the hot configuration class: two dimensions, descriptor-backed
coefficients, constant transformed boundary data, target kinds
ball / box / union-of-balls / level-table. The arithmetic mirrors the
NumPy reference backend (same lerp association, same accumulation order)
so both backends agree to rounding.
"""

from libc.math cimport INFINITY, atan2, cos, floor, fmod, sin, sqrt

cdef double TWO_PI = 6.283185307179586476925286766559


cdef inline double _bilinear(double[:, ::1] v, double rel0, double rel1,
                             Py_ssize_t nx, Py_ssize_t ny) nogil:
    cdef Py_ssize_t i0, j0
    cdef double t0, t1, a, b, lo
    i0 = <Py_ssize_t>floor(rel0)
    if i0 < 0:
        i0 = 0
    elif i0 > nx - 2:
        i0 = nx - 2
    j0 = <Py_ssize_t>floor(rel1)
    if j0 < 0:
        j0 = 0
    elif j0 > ny - 2:
        j0 = ny - 2
    t0 = rel0 - i0
    if t0 < 0.0:
        t0 = 0.0
    elif t0 > 1.0:
        t0 = 1.0
    t1 = rel1 - j0
    if t1 < 0.0:
        t1 = 0.0
    elif t1 > 1.0:
        t1 = 1.0
    # lerp along axis 1 first, then axis 0 (matches the reference backend)
    lo = v[i0, j0]
    a = lo + t1 * (v[i0, j0 + 1] - lo)
    lo = v[i0 + 1, j0]
    b = lo + t1 * (v[i0 + 1, j0 + 1] - lo)
    return a + t0 * (b - a)


cdef inline bint _in_target(int t_code, double[::1] tp, double y0, double y1,
                            double[:, ::1] sdf, double ox, double oy, double h,
                            Py_ssize_t nx, Py_ssize_t ny) nogil:
    cdef Py_ssize_t k, count
    cdef double dx, dy
    if t_code == 0:  # ball
        dx = y0 - tp[0]
        dy = y1 - tp[1]
        return sqrt(dx * dx + dy * dy) <= tp[2]
    if t_code == 1:  # axis-aligned box
        return tp[0] <= y0 <= tp[2] and tp[1] <= y1 <= tp[3]
    if t_code == 2:  # union of balls
        count = <Py_ssize_t>tp[0]
        for k in range(count):
            dx = y0 - tp[1 + 2 * k]
            dy = y1 - tp[2 + 2 * k]
            if sqrt(dx * dx + dy * dy) <= tp[1 + 2 * count + k]:
                return True
        return False
    # level table on the solver grid
    return _bilinear(sdf, (y0 - ox) / h, (y1 - oy) / h, nx, ny) <= 0.0


cdef inline double _sample(double[:, ::1] values, double y0, double y1,
                           double ox, double oy, double h, double xmax, double ymax,
                           Py_ssize_t nx, Py_ssize_t ny,
                           int t_code, double[::1] tp, double g_const,
                           double[:, ::1] sdf) nogil:
    if y0 < ox or y0 > xmax or y1 < oy or y1 > ymax:
        return 1.0
    if _in_target(t_code, tp, y0, y1, sdf, ox, oy, h, nx, ny):
        return g_const
    return _bilinear(values, (y0 - ox) / h, (y1 - oy) / h, nx, ny)


cdef inline double _trig_raw(double[::1] p, double theta) nogil:
    cdef Py_ssize_t ncos = <Py_ssize_t>p[0]
    cdef Py_ssize_t nsin = <Py_ssize_t>p[1]
    cdef Py_ssize_t k
    cdef double out = p[2]
    for k in range(1, ncos):
        out += p[2 + k] * cos(k * theta)
    for k in range(nsin):
        out += p[2 + ncos + k] * sin((k + 1) * theta)
    return out


cdef inline double _table_raw(double[::1] p, double theta) nogil:
    cdef Py_ssize_t m = <Py_ssize_t>p[0]
    cdef double t = fmod(theta, TWO_PI)
    cdef double pos, frac, a
    cdef Py_ssize_t j0, j1
    if t < 0.0:
        t += TWO_PI
    pos = t / TWO_PI * m
    j0 = <Py_ssize_t>floor(pos)
    frac = pos - j0
    j0 = j0 % m
    j1 = (j0 + 1) % m
    a = p[1 + j0]
    return a + frac * (p[1 + j1] - a)


cdef inline double _coef_eval(int code, double[::1] p, double vx, double vy) nogil:
    cdef double a0, a1
    if code == 0:
        return p[0]
    if code == 2:
        a0 = p[0] * vx
        a1 = p[1] * vy
        return sqrt(a0 * a0 + a1 * a1)
    if code == 1:
        return 0.5 * (_trig_raw(p, atan2(vy, vx)) + _trig_raw(p, atan2(-vy, -vx)))
    return 0.5 * (_table_raw(p, atan2(vy, vx)) + _table_raw(p, atan2(-vy, -vx)))


def sweep2d(double[:, ::1] src, double[:, ::1] dst, unsigned char[:, ::1] mask,
            double ox, double oy, double h,
            double[:, :, ::1] disp, double[:, :, ::1] seeds,
            double sqrt2eps, double eps2, double discount, double one_minus,
            int b_code, double[::1] b_params, int c_code, double[::1] c_params,
            int t_code, double[::1] t_params, double g_const, double[:, ::1] sdf,
            int mode):
    """One Jacobi (mode 0) or Gauss-Seidel (1 forward / 2 reverse) sweep.

    seeds has shape (nx*ny, K, 2) in node C order; rows with squared norm
    below 0.25 mark absent seeds.
    """
    cdef Py_ssize_t nx = src.shape[0]
    cdef Py_ssize_t ny = src.shape[1]
    cdef Py_ssize_t n_cand = disp.shape[0]
    cdef Py_ssize_t n_sign = disp.shape[1]
    cdef Py_ssize_t n_seed = seeds.shape[1]
    cdef double xmax = ox + h * (nx - 1)
    cdef double ymax = oy + h * (ny - 1)
    cdef double[:, ::1] read = src if mode == 0 else dst
    cdef Py_ssize_t i, j, c, s, k, istep, i0, j0, flat
    cdef double x0, x1, y0, y1, best, worst, val
    cdef double v1x, v1y, root_b, c_val, colx, coly, t1
    cdef double drift0, drift1, orient, sgn

    if mode == 2:
        istep = -1
        i0 = nx - 1
        j0 = ny - 1
    else:
        istep = 1
        i0 = 0
        j0 = 0

    with nogil:
        i = i0
        while 0 <= i < nx:
            x0 = ox + h * i
            j = j0
            while 0 <= j < ny:
                if mask[i, j]:
                    if mode == 0:
                        dst[i, j] = src[i, j]
                    j += istep
                    continue
                x1 = oy + h * j
                best = INFINITY
                for c in range(n_cand):
                    worst = -INFINITY
                    for s in range(n_sign):
                        y0 = x0 + disp[c, s, 0]
                        y1 = x1 + disp[c, s, 1]
                        val = _sample(read, y0, y1, ox, oy, h, xmax, ymax, nx, ny,
                                      t_code, t_params, g_const, sdf)
                        if val > worst:
                            worst = val
                    if worst < best:
                        best = worst
                flat = i * ny + j
                for k in range(n_seed):
                    v1x = seeds[flat, k, 0]
                    v1y = seeds[flat, k, 1]
                    if v1x * v1x + v1y * v1y < 0.25:
                        continue
                    root_b = sqrt(_coef_eval(b_code, b_params, v1x, v1y))
                    c_val = _coef_eval(c_code, c_params, v1x, v1y)
                    colx = -v1y * root_b
                    coly = v1x * root_b
                    t1 = eps2 * c_val
                    for c in range(2):
                        orient = -1.0 if c == 0 else 1.0
                        drift0 = t1 * (orient * v1x)
                        drift1 = t1 * (orient * v1y)
                        worst = -INFINITY
                        for s in range(2):
                            sgn = 1.0 if s == 0 else -1.0
                            y0 = (x0 + sqrt2eps * (sgn * colx)) + drift0
                            y1 = (x1 + sqrt2eps * (sgn * coly)) + drift1
                            val = _sample(read, y0, y1, ox, oy, h, xmax, ymax, nx, ny,
                                          t_code, t_params, g_const, sdf)
                            if val > worst:
                                worst = val
                        if worst < best:
                            best = worst
                dst[i, j] = one_minus + discount * best
                j += istep
            i += istep
