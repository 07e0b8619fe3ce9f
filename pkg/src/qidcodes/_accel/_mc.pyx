# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend: tight C loops over a Philox bit generator.

Must consume uniforms in exactly the same order as the numpy backend
(trial-major, entry-major, (u1, u2) pairs) so both walk the same stream.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, log1p, sin, sqrt
from numpy.random cimport bitgen_t
from numpy.random import Philox

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559


cdef bitgen_t *_bitgen(object philox):
    return <bitgen_t *> PyCapsule_GetPointer(philox.capsule, "BitGenerator")


def projector_mass_chunk(int d, int r, Py_ssize_t count, root, stream, chunk):
    philox = Philox(counter=[0, chunk, 0, 0], key=[root, stream])
    cdef bitgen_t *rng = _bitgen(philox)
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef int k
    cdef double e, head, tot
    with nogil:
        for i in range(count):
            head = 0.0
            tot = 0.0
            for k in range(d):
                e = -log1p(-rng.next_double(rng.state))
                tot += e
                if k < r:
                    head += e
            ov[i] = head / tot
    return out


def reduced_eigrange_chunk(int t, int u, Py_ssize_t count, root, stream, chunk):
    if t != 2:
        raise NotImplementedError("compiled kernel covers the t == 2 hot path")
    philox = Philox(counter=[0, chunk, 0, 0], key=[root, stream])
    cdef bitgen_t *rng = _bitgen(philox)
    mins = np.empty(count, dtype=np.float64)
    maxs = np.empty(count, dtype=np.float64)
    row_re = np.empty(u, dtype=np.float64)
    row_im = np.empty(u, dtype=np.float64)
    cdef double[::1] mn = mins
    cdef double[::1] mx = maxs
    cdef double[::1] g0r = row_re
    cdef double[::1] g0i = row_im
    cdef Py_ssize_t i
    cdef int j
    cdef double amp, ang, re, im
    cdef double a, c, br, bi, tr, disc
    with nogil:
        for i in range(count):
            a = 0.0
            c = 0.0
            br = 0.0
            bi = 0.0
            for j in range(u):
                amp = sqrt(-log1p(-rng.next_double(rng.state)))
                ang = TWO_PI * rng.next_double(rng.state)
                re = amp * cos(ang)
                im = amp * sin(ang)
                g0r[j] = re
                g0i[j] = im
                a += re * re + im * im
            for j in range(u):
                amp = sqrt(-log1p(-rng.next_double(rng.state)))
                ang = TWO_PI * rng.next_double(rng.state)
                re = amp * cos(ang)
                im = amp * sin(ang)
                c += re * re + im * im
                # b = sum_j g0j * conj(g1j)
                br += g0r[j] * re + g0i[j] * im
                bi += g0i[j] * re - g0r[j] * im
            tr = a + c
            disc = sqrt(0.25 * (a - c) * (a - c) + br * br + bi * bi)
            mn[i] = (0.5 * tr - disc) / tr
            mx[i] = (0.5 * tr + disc) / tr
    return mins, maxs
