"""Pure-Python Dormand-Prince 5(4) kernel for the classical Dicke flow.

Mirrors the compiled kernel line for line; used when the extension is not
built. State layout: (q, p, jx, jy, jz).
"""
import math

import numpy as np

# step-size safety factor; 0.8 keeps the unrenormalized spin-norm drift
# below 1e-8 j per 1e3 time units at rtol 1e-10
SAFETY = 0.8
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
A71, A73, A74, A75, A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40
D1, D3, D4 = -12715105075 / 11282082432, 87487479700 / 32700410799, -10690763975 / 1880347072
D5, D6, D7 = 701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423


def _rhs(y, w, w0, b):
    q, p, jx, jy, jz = y
    bq = b * q
    return [w * p, -w * q - b * jx, -w0 * jy, w0 * jx - bq * jz, bq * jy]


def _comb(y, h, ks, cs):
    out = list(y)
    for k, c in zip(ks, cs):
        if c != 0.0:
            hc = h * c
            for i in range(5):
                out[i] += hc * k[i]
    return out


def _dense(y0, y1, k1, k7, h, ks, theta):
    out = [0.0] * 5
    th1 = 1 - theta
    for i in range(5):
        r2 = y1[i] - y0[i]
        r3 = h * k1[i] - r2
        r4 = r2 - h * k7[i] - r3
        r5 = h * (D1 * ks[0][i] + D3 * ks[2][i] + D4 * ks[3][i] + D5 * ks[4][i] + D6 * ks[5][i] + D7 * k7[i])
        out[i] = y0[i] + theta * (r2 + th1 * (r3 + theta * (r4 + th1 * r5)))
    return out


def run(y0, w, w0, b, T, dt_out, rtol, atol, renorm, section, max_steps):
    """Integrate to time T, sampling every dt_out; see the compiled twin."""
    direction = 1.0 if T >= 0 else -1.0
    n_out = int(math.floor(abs(T) / dt_out + 1e-9)) + 1
    out = np.empty((n_out, 5))
    y = [float(v) for v in y0]
    out[0] = y
    jlen = math.sqrt(y[2] ** 2 + y[3] ** 2 + y[4] ** 2)
    t = 0.0
    fmax = max(w, w0, abs(b) * (abs(y[0]) + 1.0), abs(b) * jlen, 1e-300)
    h = direction * min(0.01 / fmax, abs(T) if T != 0 else 1.0)
    k1 = _rhs(y, w, w0, b)
    next_out = 1
    steps = rejected = 0
    max_renorm = 0.0
    sect = []
    while next_out < n_out:
        if steps >= max_steps:
            raise RuntimeError("step budget exhausted")
        if direction * (t + h - T) > 0:
            h = T - t
        k2 = _rhs(_comb(y, h, [k1], [A21]), w, w0, b)
        k3 = _rhs(_comb(y, h, [k1, k2], [A31, A32]), w, w0, b)
        k4 = _rhs(_comb(y, h, [k1, k2, k3], [A41, A42, A43]), w, w0, b)
        k5 = _rhs(_comb(y, h, [k1, k2, k3, k4], [A51, A52, A53, A54]), w, w0, b)
        k6 = _rhs(_comb(y, h, [k1, k2, k3, k4, k5], [A61, A62, A63, A64, A65]), w, w0, b)
        y1 = _comb(y, h, [k1, k3, k4, k5, k6], [A71, A73, A74, A75, A76])
        k7 = _rhs(y1, w, w0, b)
        err = 0.0
        for i in range(5):
            e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(y1[i]))
            err = max(err, abs(e) / sc)
        steps += 1
        if err > 1.0:
            rejected += 1
            h *= max(0.2, SAFETY * err ** -0.2)
            continue
        ks = (k1, k2, k3, k4, k5, k6)
        t1 = t + h
        if section and y[1] < 0.0 <= y1[1]:
            lo, hi = 0.0, 1.0
            plo, phi = y[1], y1[1]
            side = 0
            theta = 1.0
            for _ in range(100):
                theta = lo - plo * (hi - lo) / (phi - plo)
                pt = _dense(y, y1, k1, k7, h, ks, theta)[1]
                if abs(pt) <= 1e-13 or hi - lo < 1e-15:
                    break
                if pt < 0:
                    lo, plo = theta, pt
                    if side == -1:
                        phi *= 0.5
                    side = -1
                else:
                    hi, phi = theta, pt
                    if side == 1:
                        plo *= 0.5
                    side = 1
            ys = _dense(y, y1, k1, k7, h, ks, theta)
            sect.append([t + theta * h] + ys)
        sampled = False
        while next_out < n_out and direction * (next_out * dt_out * direction - t1) <= 1e-12 * abs(dt_out):
            t_o = next_out * dt_out * direction
            theta = (t_o - t) / h
            out[next_out] = _dense(y, y1, k1, k7, h, ks, theta)
            next_out += 1
            sampled = True
        y, t = y1, t1
        k1 = k7
        if renorm and sampled:
            nrm = math.sqrt(y[2] ** 2 + y[3] ** 2 + y[4] ** 2)
            max_renorm = max(max_renorm, abs(nrm - jlen))
            s = jlen / nrm
            y[2] *= s
            y[3] *= s
            y[4] *= s
            k1 = _rhs(y, w, w0, b)
        h *= min(5.0, max(0.2, SAFETY * err ** -0.2)) if err > 0 else 5.0
    return out, np.array(sect).reshape(-1, 6), steps, rejected, max_renorm
