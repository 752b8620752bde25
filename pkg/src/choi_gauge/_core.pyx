# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: complex Jacobi eigensolver and the batched
witness-split protocol. Mirrors ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, fabs

cnp.import_array()

DEF NMAX = 16
cdef int MAX_SWEEPS = 100
cdef double PHASE_TOL = 1e-8


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex cconj(double complex z) nogil:
    return z.real - 1j * z.imag


cdef void _jacobi(double complex* a, double complex* v, double* w, int n) nogil:
    cdef int i, j, k, p, q, sweep
    cdef double frob = 0.0, off, r, app, aqq, tau, t, c, s
    cdef double complex apq, e, ec, akp, akq, apk, aqk, vkp, vkq
    for i in range(n):
        for j in range(n):
            v[i * n + j] = 1.0 if i == j else 0.0
            frob += cabs2(a[i * n + j])
    frob = sqrt(frob)
    if frob == 0.0:
        for i in range(n):
            w[i] = 0.0
        return
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += cabs2(a[p * n + q])
        if sqrt(off) <= 1e-15 * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                r = sqrt(cabs2(apq))
                if r < 1e-300:
                    continue
                e = apq / r
                ec = cconj(e)
                app = a[p * n + p].real
                aqq = a[q * n + q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k * n + p]
                    akq = a[k * n + q]
                    a[k * n + p] = c * akp - s * ec * akq
                    a[k * n + q] = s * akp + c * ec * akq
                for k in range(n):
                    apk = a[p * n + k]
                    aqk = a[q * n + k]
                    a[p * n + k] = c * apk - s * e * aqk
                    a[q * n + k] = s * apk + c * e * aqk
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                a[p * n + p] = app - t * r
                a[q * n + q] = aqq + t * r
                for k in range(n):
                    vkp = v[k * n + p]
                    vkq = v[k * n + q]
                    v[k * n + p] = c * vkp - s * ec * vkq
                    v[k * n + q] = s * vkp + c * ec * vkq
    for i in range(n):
        w[i] = a[i * n + i].real


cdef void _sort_phase(double* w, double complex* v, double* ws,
                      double complex* vs, int n) nogil:
    # stable selection order by eigenvalue, lowest index first on ties
    cdef int used[NMAX]
    cdef int i, j, best, r
    cdef double mag
    cdef double complex ph, comp
    for i in range(n):
        used[i] = 0
    for i in range(n):
        best = -1
        for j in range(n):
            if used[j]:
                continue
            if best < 0 or w[j] < w[best]:
                best = j
        used[best] = 1
        ws[i] = w[best]
        for r in range(n):
            vs[r * n + i] = v[r * n + best]
    for i in range(n):
        for r in range(n):
            comp = vs[r * n + i]
            mag = sqrt(cabs2(comp))
            if mag > PHASE_TOL:
                ph = cconj(comp) / mag
                for j in range(n):
                    vs[j * n + i] = vs[j * n + i] * ph
                break


def jacobi_eigh(a):
    """Eigen-decompose a symmetrized Hermitian matrix (n <= 16)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.ascontiguousarray(a, dtype=np.complex128).copy()
    cdef int n = arr.shape[0]
    if n > NMAX:
        raise ValueError("dimension above 16")
    cdef double complex buf[NMAX * NMAX]
    cdef double complex vec[NMAX * NMAX]
    cdef double complex vs[NMAX * NMAX]
    cdef double w[NMAX]
    cdef double ws[NMAX]
    cdef int i, j
    for i in range(n):
        for j in range(n):
            buf[i * n + j] = arr[i, j]
    with nogil:
        _jacobi(buf, vec, w, n)
        _sort_phase(w, vec, ws, vs, n)
    vals = np.empty(n, dtype=np.float64)
    vecs = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        vals[i] = ws[i]
        for j in range(n):
            vecs[i, j] = vs[i * n + j]
    return vals, vecs


cdef inline void _freq16(const cnp.int64_t[:, :, :] ones, Py_ssize_t r,
                         double inv_n, double* f) nogil:
    cdef int k
    cdef double pz
    for k in range(4):
        pz = ones[r, k, 2] * inv_n
        f[4 * k] = 1.0 - pz
        f[4 * k + 1] = pz
        f[4 * k + 2] = ones[r, k, 0] * inv_n
        f[4 * k + 3] = ones[r, k, 1] * inv_n


def two_round_batch(ones1, ones2, long n_shots, basis):
    """Batched witness-split protocol; see ``_pykernels.two_round_batch``."""
    cdef const cnp.int64_t[:, :, :] o1 = np.ascontiguousarray(ones1, dtype=np.int64)
    cdef const cnp.int64_t[:, :, :] o2 = np.ascontiguousarray(ones2, dtype=np.int64)
    cdef const double complex[:, :, :] b = np.ascontiguousarray(basis, dtype=np.complex128)
    cdef Py_ssize_t reps = o1.shape[0]
    lam_a = np.empty(reps)
    exp_a = np.empty(reps)
    c_a = np.empty(reps)
    p_a = np.empty(reps)
    cdef double[:] lam = lam_a
    cdef double[:] ex = exp_a
    cdef double[:] cr = c_a
    cdef double[:] pb = p_a
    cdef double inv_n = 1.0 / n_shots
    cdef double f1[16]
    cdef double f2[16]
    cdef double coef[16]
    cdef double complex rho[16]
    cdef double complex vec[16]
    cdef double complex vs[16]
    cdef double w[4]
    cdef double ws[4]
    cdef double complex h, acc
    cdef double c_const, e_val, t, p, wz0, wz1, wx1, wy1
    cdef Py_ssize_t r
    cdef int m, i, j, k
    with nogil:
        for r in range(reps):
            _freq16(o1, r, inv_n, f1)
            for i in range(16):
                rho[i] = 0.0
            for m in range(16):
                for i in range(4):
                    for j in range(4):
                        rho[4 * i + j] = rho[4 * i + j] + f1[m] * b[m, i, j]
            for i in range(4):
                for j in range(i, 4):
                    h = 0.5 * (rho[4 * i + j] + cconj(rho[4 * j + i]))
                    rho[4 * i + j] = h
                    rho[4 * j + i] = cconj(h)
            _jacobi(rho, vec, w, 4)
            _sort_phase(w, vec, ws, vs, 4)
            lam[r] = ws[0]
            if ws[0] >= 0.0:
                ex[r] = 0.0
                cr[r] = 0.0
                pb[r] = 1.0
                continue
            for m in range(16):
                acc = 0.0
                for i in range(4):
                    for j in range(4):
                        acc = acc + cconj(vs[4 * i]) * b[m, i, j] * vs[4 * j]
                coef[m] = acc.real
            c_const = 0.0
            for k in range(4):
                wz0 = coef[4 * k]
                wz1 = coef[4 * k + 1]
                wx1 = coef[4 * k + 2]
                wy1 = coef[4 * k + 3]
                c_const = c_const + (wz1 - wz0) * (wz1 - wz0) + wx1 * wx1 + wy1 * wy1
            _freq16(o2, r, inv_n, f2)
            e_val = 0.0
            for m in range(16):
                e_val = e_val + coef[m] * f2[m]
            ex[r] = e_val
            cr[r] = c_const
            t = -e_val
            if t <= 0.0 or c_const <= 0.0:
                pb[r] = 1.0
            else:
                p = exp(-2.0 * t * t * n_shots / c_const)
                if p <= 0.0:
                    p = 5e-324
                if p > 1.0:
                    p = 1.0
                pb[r] = p
    return lam_a, exp_a, c_a, p_a
