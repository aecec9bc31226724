# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) kernel for the classical Dicke flow.

State layout: (q, p, jx, jy, jz). The spin precesses as dj/dt = B x j with
B = (b q, 0, omega0); the field obeys dq/dt = omega p, dp/dt = -omega q - b jx.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, floor, pow, fmax, fmin

cnp.import_array()

# step-size safety factor, kept equal to the Python twin
cdef double SAFETY = 0.8
cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192, A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40
cdef double D1 = -12715105075.0 / 11282082432, D3 = 87487479700.0 / 32700410799
cdef double D4 = -10690763975.0 / 1880347072, D5 = 701980252875.0 / 199316789632
cdef double D6 = -1453857185.0 / 822651844, D7 = 69997945.0 / 29380423


cdef inline void rhs(double* y, double* dy, double w, double w0, double b) nogil:
    cdef double bq = b * y[0]
    dy[0] = w * y[1]
    dy[1] = -w * y[0] - b * y[2]
    dy[2] = -w0 * y[3]
    dy[3] = w0 * y[2] - bq * y[4]
    dy[4] = bq * y[3]


cdef inline void dense(double* y0, double* y1, double (*k)[7][5], double h, double theta,
                       double* out) nogil:
    cdef int i
    cdef double r2, r3, r4, r5, th1 = 1.0 - theta
    for i in range(5):
        r2 = y1[i] - y0[i]
        r3 = h * k[0][0][i] - r2
        r4 = r2 - h * k[0][6][i] - r3
        r5 = h * (D1 * k[0][0][i] + D3 * k[0][2][i] + D4 * k[0][3][i] + D5 * k[0][4][i]
                  + D6 * k[0][5][i] + D7 * k[0][6][i])
        out[i] = y0[i] + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))


def run(y0, double w, double w0, double b, double T, double dt_out, double rtol, double atol,
        bint renorm, bint section, long max_steps):
    """Integrate to time T, sampling every dt_out.

    Returns (samples, section_points, steps, rejected, max_renorm) where
    section points are rows (t, q, p, jx, jy, jz) at upward p = 0 crossings.
    """
    cdef double direction = 1.0 if T >= 0 else -1.0
    cdef long n_out = <long>floor(fabs(T) / dt_out + 1e-9) + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((n_out, 5))
    cdef double[:, ::1] out = out_arr
    cdef double y[5]
    cdef double y1[5]
    cdef double tmp[5]
    cdef double ys[5]
    cdef double k[7][5]
    cdef int i, it, side
    cdef double t = 0.0, t1, h, err, e, sc, jlen, nrm, s, fm, theta, lo, hi, plo, phi, pt, t_o
    cdef long next_out = 1, steps = 0, rejected = 0
    cdef double max_renorm = 0.0
    cdef bint sampled
    sect = []
    for i in range(5):
        y[i] = y0[i]
        out[0, i] = y[i]
    jlen = sqrt(y[2] * y[2] + y[3] * y[3] + y[4] * y[4])
    fm = fmax(fmax(w, w0), fmax(fabs(b) * (fabs(y[0]) + 1.0), fabs(b) * jlen))
    fm = fmax(fm, 1e-300)
    h = direction * fmin(0.01 / fm, fabs(T) if T != 0 else 1.0)
    rhs(y, k[0], w, w0, b)
    while next_out < n_out:
        if steps >= max_steps:
            raise RuntimeError("step budget exhausted")
        if direction * (t + h - T) > 0:
            h = T - t
        for i in range(5):
            tmp[i] = y[i] + h * A21 * k[0][i]
        rhs(tmp, k[1], w, w0, b)
        for i in range(5):
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i])
        rhs(tmp, k[2], w, w0, b)
        for i in range(5):
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i])
        rhs(tmp, k[3], w, w0, b)
        for i in range(5):
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i])
        rhs(tmp, k[4], w, w0, b)
        for i in range(5):
            tmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i]
                                 + A65 * k[4][i])
        rhs(tmp, k[5], w, w0, b)
        for i in range(5):
            y1[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i]
                                + A76 * k[5][i])
        rhs(y1, k[6], w, w0, b)
        err = 0.0
        for i in range(5):
            e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                     + E7 * k[6][i])
            sc = atol + rtol * fmax(fabs(y[i]), fabs(y1[i]))
            err = fmax(err, fabs(e) / sc)
        steps += 1
        if err > 1.0:
            rejected += 1
            h *= fmax(0.2, SAFETY * pow(err, -0.2))
            continue
        t1 = t + h
        if section and y[1] < 0.0 and y1[1] >= 0.0:
            lo = 0.0
            hi = 1.0
            plo = y[1]
            phi = y1[1]
            side = 0
            theta = 1.0
            for it in range(100):
                theta = lo - plo * (hi - lo) / (phi - plo)
                dense(y, y1, &k, h, theta, ys)
                pt = ys[1]
                if fabs(pt) <= 1e-13 or hi - lo < 1e-15:
                    break
                if pt < 0:
                    lo = theta
                    plo = pt
                    if side == -1:
                        phi *= 0.5
                    side = -1
                else:
                    hi = theta
                    phi = pt
                    if side == 1:
                        plo *= 0.5
                    side = 1
            dense(y, y1, &k, h, theta, ys)
            sect.append([t + theta * h, ys[0], ys[1], ys[2], ys[3], ys[4]])
        sampled = False
        while next_out < n_out and direction * (next_out * dt_out * direction - t1) <= 1e-12 * fabs(dt_out):
            t_o = next_out * dt_out * direction
            theta = (t_o - t) / h
            dense(y, y1, &k, h, theta, ys)
            for i in range(5):
                out[next_out, i] = ys[i]
            next_out += 1
            sampled = True
        for i in range(5):
            y[i] = y1[i]
            k[0][i] = k[6][i]
        t = t1
        if renorm and sampled:
            nrm = sqrt(y[2] * y[2] + y[3] * y[3] + y[4] * y[4])
            max_renorm = fmax(max_renorm, fabs(nrm - jlen))
            s = jlen / nrm
            y[2] *= s
            y[3] *= s
            y[4] *= s
            rhs(y, k[0], w, w0, b)
        if err > 0:
            h *= fmin(5.0, fmax(0.2, SAFETY * pow(err, -0.2)))
        else:
            h *= 5.0
    return out_arr, np.array(sect, dtype=float).reshape(-1, 6), steps, rejected, max_renorm
