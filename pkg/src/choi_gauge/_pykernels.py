"""Pure-Python implementations of the hot kernels.

This module is the reference the compiled ``_core`` extension mirrors line by
line. It is selected automatically when the extension is not built, or when
``CHOI_GAUGE_BACKEND=python`` is set.
"""
import math

import numpy as np

MAX_SWEEPS = 100
PHASE_TOL = 1e-8

# setting columns in count arrays: x, y, z
_SX, _SY, _SZ = 0, 1, 2


def _jacobi(a, n):
    """Cyclic complex Jacobi on a list-of-lists Hermitian matrix (modified in place)."""
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    frob = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n)))
    if frob == 0.0:
        return [0.0] * n, v
    for _ in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += abs(a[p][q]) ** 2
        if math.sqrt(off) <= 1e-15 * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                e = apq / r
                ec = e.conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k][p]
                    akq = a[k][q]
                    a[k][p] = c * akp - s * ec * akq
                    a[k][q] = s * akp + c * ec * akq
                for k in range(n):
                    apk = a[p][k]
                    aqk = a[q][k]
                    a[p][k] = c * apk - s * e * aqk
                    a[q][k] = s * apk + c * e * aqk
                a[p][q] = 0j
                a[q][p] = 0j
                a[p][p] = complex(app - t * r, 0.0)
                a[q][q] = complex(aqq + t * r, 0.0)
                for k in range(n):
                    vkp = v[k][p]
                    vkq = v[k][q]
                    v[k][p] = c * vkp - s * ec * vkq
                    v[k][q] = s * vkp + c * ec * vkq
    return [a[i][i].real for i in range(n)], v


def _sorted_phased(w, v, n):
    order = sorted(range(n), key=lambda i: w[i])
    vals = [w[i] for i in order]
    vecs = [[v[r][i] for r in range(n)] for i in order]
    for col in vecs:
        for comp in col:
            mag = abs(comp)
            if mag > PHASE_TOL:
                ph = comp.conjugate() / mag
                for r in range(n):
                    col[r] = col[r] * ph
                break
    return vals, vecs


def jacobi_eigh(a):
    """Eigen-decompose a Hermitian matrix that has already been symmetrized.

    Returns ascending eigenvalues and the matching eigenvectors as columns,
    each column phased so its first component above ``PHASE_TOL`` is real
    and non-negative.
    """
    arr = np.asarray(a, dtype=complex)
    n = arr.shape[0]
    w, v = _jacobi(arr.tolist(), n)
    vals, vecs = _sorted_phased(w, v, n)
    return np.array(vals, dtype=float), np.array(vecs, dtype=complex).T


def two_round_batch(ones1, ones2, n_shots, basis):
    """Evaluate the witness-split protocol for a batch of repetitions.

    ``ones1``/``ones2`` have shape (reps, 4, 3): outcome-1 counts per
    (preparation, setting) for the witness round and the test round.
    ``basis`` has shape (16, 4, 4): the product duals indexed prep*4 + output.

    Returns arrays ``lam_min``, ``expectation``, ``range_constant`` and
    ``p_bound``. Repetitions with a non-negative round-one eigenvalue skip the
    test round: expectation 0, range constant 0, bound 1.
    """
    ones1 = np.asarray(ones1, dtype=np.int64)
    ones2 = np.asarray(ones2, dtype=np.int64)
    basis_l = np.asarray(basis, dtype=complex).reshape(16, 16).tolist()
    reps = ones1.shape[0]
    lam = np.empty(reps)
    expect = np.empty(reps)
    crange = np.empty(reps)
    pbound = np.empty(reps)
    inv_n = 1.0 / n_shots
    o1 = ones1.tolist()
    o2 = ones2.tolist()
    for r in range(reps):
        f1 = _freq16(o1[r], inv_n)
        rho = [[0j] * 4 for _ in range(4)]
        for m in range(16):
            fm = f1[m]
            bm = basis_l[m]
            for i in range(4):
                row = rho[i]
                for j in range(4):
                    row[j] += fm * bm[4 * i + j]
        for i in range(4):
            for j in range(i, 4):
                h = 0.5 * (rho[i][j] + rho[j][i].conjugate())
                rho[i][j] = h
                rho[j][i] = h.conjugate()
        w, v = _jacobi(rho, 4)
        vals, vecs = _sorted_phased(w, v, 4)
        lam[r] = vals[0]
        if vals[0] >= 0.0:
            expect[r] = 0.0
            crange[r] = 0.0
            pbound[r] = 1.0
            continue
        vec = vecs[0]
        coef = []
        for m in range(16):
            bm = basis_l[m]
            acc = 0j
            for i in range(4):
                vi = vec[i].conjugate()
                for j in range(4):
                    acc += vi * bm[4 * i + j] * vec[j]
            coef.append(acc.real)
        c_const = 0.0
        for k in range(4):
            wz0, wz1, wx1, wy1 = coef[4 * k], coef[4 * k + 1], coef[4 * k + 2], coef[4 * k + 3]
            c_const += (wz1 - wz0) ** 2 + wx1 * wx1 + wy1 * wy1
        f2 = _freq16(o2[r], inv_n)
        e_val = 0.0
        for m in range(16):
            e_val += coef[m] * f2[m]
        expect[r] = e_val
        crange[r] = c_const
        pbound[r] = _bound(e_val, n_shots, c_const)
    return lam, expect, crange, pbound


def _freq16(ones, inv_n):
    f = []
    for k in range(4):
        row = ones[k]
        pz = row[_SZ] * inv_n
        f.extend((1.0 - pz, pz, row[_SX] * inv_n, row[_SY] * inv_n))
    return f


def _bound(e_val, n_shots, c_const):
    t = -e_val
    if t <= 0.0 or c_const <= 0.0:
        return 1.0
    p = math.exp(-2.0 * t * t * n_shots / c_const)
    if p <= 0.0:
        return 5e-324
    return min(p, 1.0)
