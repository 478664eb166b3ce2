"""
Compiled pair sweeps over a half neighbor list (see domain.build_pair_list).

Every pair is visited once and its contribution is written to both members,
which keeps pairwise antisymmetry exact and halves the work on one core. Visit
order is fixed by the list, so serial results are bitwise reproducible.

Pair displacements are x_i - x_j + shifts[image[s]].
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .kernel import SIGMA

FLUID = 0
DYNAMIC = 1
WAVEMAKER = 2


@njit(cache=True, error_model="numpy")
def boundary_proximity(pos, kind, offsets, nbrs, image, shifts, h, near):
    """Flag fluid particles with a non-fluid particle within 2h."""
    near[:] = False
    reach2 = 4.0 * h * h
    n = pos.shape[0]
    for i in range(n):
        fi = kind[i] == FLUID
        for s in range(offsets[i], offsets[i + 1]):
            j = nbrs[s]
            if fi == (kind[j] == FLUID):
                continue
            c = image[s]
            dx = pos[i, 0] - pos[j, 0] + shifts[c, 0]
            dy = pos[i, 1] - pos[j, 1] + shifts[c, 1]
            dz = pos[i, 2] - pos[j, 2] + shifts[c, 2]
            if dx * dx + dy * dy + dz * dz <= reach2:
                if fi:
                    near[i] = True
                else:
                    near[j] = True


@njit(cache=True, error_model="numpy")
def support_and_matrix(pos, rho, mass, kind, corrected, offsets, nbrs, image, shifts, h, w, A):
    """
    Support w for corrected particles and their neighbors, corrective matrix A
    for corrected particles. Other entries of w and A are zero.
    """
    n = pos.shape[0]
    need = corrected.copy()
    for i in range(n):
        if corrected[i]:
            for s in range(offsets[i], offsets[i + 1]):
                need[nbrs[s]] = True
        else:
            for s in range(offsets[i], offsets[i + 1]):
                if corrected[nbrs[s]]:
                    need[i] = True
                    break
    for i in range(n):
        if kind[i] == WAVEMAKER:
            need[i] = False
    vol = np.empty(n)
    for i in range(n):
        vol[i] = mass[i] / rho[i]
        w[i] = 0.0
        for a in range(3):
            for b in range(3):
                A[i, a, b] = 0.0

    inv_h = 1.0 / h
    reach2 = 4.0 * h * h
    cw = SIGMA * inv_h * inv_h * inv_h
    cf = 5.0 * cw * inv_h * inv_h
    for i in range(n):
        ni = need[i]
        ci = corrected[i]
        vi = vol[i]
        wi = cw * vi if ni else 0.0
        a00 = 0.0
        a01 = 0.0
        a02 = 0.0
        a11 = 0.0
        a12 = 0.0
        a22 = 0.0
        for s in range(offsets[i], offsets[i + 1]):
            j = nbrs[s]
            nj = need[j]
            if not (ni or nj) or kind[j] == WAVEMAKER:
                continue
            c = image[s]
            dx = pos[i, 0] - pos[j, 0] + shifts[c, 0]
            dy = pos[i, 1] - pos[j, 1] + shifts[c, 1]
            dz = pos[i, 2] - pos[j, 2] + shifts[c, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 >= reach2:
                continue
            q = math.sqrt(r2) * inv_h
            t = 1.0 - 0.5 * q
            t3 = t * t * t
            wk = cw * t3 * t * (2.0 * q + 1.0)
            vj = vol[j]
            if ni:
                wi += vj * wk
            if nj:
                w[j] += vi * wk
            cj = corrected[j]
            if ci or cj:
                # -F = 5 sigma t^3 / h^5
                f = cf * t3
                xx = f * dx * dx
                xy = f * dx * dy
                xz = f * dx * dz
                yy = f * dy * dy
                yz = f * dy * dz
                zz = f * dz * dz
                if ci:
                    a00 += xx * vj
                    a01 += xy * vj
                    a02 += xz * vj
                    a11 += yy * vj
                    a12 += yz * vj
                    a22 += zz * vj
                if cj:
                    A[j, 0, 0] += xx * vi
                    A[j, 0, 1] += xy * vi
                    A[j, 0, 2] += xz * vi
                    A[j, 1, 1] += yy * vi
                    A[j, 1, 2] += yz * vi
                    A[j, 2, 2] += zz * vi
        if ni:
            w[i] += wi
        if ci:
            A[i, 0, 0] += a00
            A[i, 0, 1] += a01
            A[i, 0, 2] += a02
            A[i, 1, 1] += a11
            A[i, 1, 2] += a12
            A[i, 2, 2] += a22
            A[i, 1, 0] = A[i, 0, 1]
            A[i, 2, 0] = A[i, 0, 2]
            A[i, 2, 1] = A[i, 1, 2]


@njit(cache=True, error_model="numpy")
def all_supports(pos, rho, mass, kind, offsets, nbrs, image, shifts, h, w):
    """w_i for every density-carrying particle; zero for wavemaker particles."""
    n = pos.shape[0]
    inv_h = 1.0 / h
    reach2 = 4.0 * h * h
    cw = SIGMA * inv_h * inv_h * inv_h
    for i in range(n):
        w[i] = mass[i] / rho[i] * cw if kind[i] != WAVEMAKER else 0.0
    for i in range(n):
        if kind[i] == WAVEMAKER:
            continue
        for s in range(offsets[i], offsets[i + 1]):
            j = nbrs[s]
            if kind[j] == WAVEMAKER:
                continue
            c = image[s]
            dx = pos[i, 0] - pos[j, 0] + shifts[c, 0]
            dy = pos[i, 1] - pos[j, 1] + shifts[c, 1]
            dz = pos[i, 2] - pos[j, 2] + shifts[c, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if r2 < reach2:
                q = math.sqrt(r2) * inv_h
                t = 1.0 - 0.5 * q
                wk = cw * t * t * t * t * (2.0 * q + 1.0)
                w[i] += mass[j] / rho[j] * wk
                w[j] += mass[i] / rho[i] * wk


@njit(cache=True, error_model="numpy")
def rates(pos, vel, rho, mass, p, kind, corrected, w, A, offsets, nbrs, image, shifts,
          h, c0, xi, visc, eps, gmag, use_correction, rtol,
          lj_d, lj_r0, lj_p1, lj_p2, acc, acc_ext, drho, counters):
    """
    Density rate and internal (pressure + viscosity) acceleration for every
    density-carrying particle, plus the Lennard-Jones push of wavemaker
    particles on fluid particles in acc_ext.

    visc is alpha * h * c0. counters[0] counts singular pair fallbacks,
    counters[1] clamped Lennard-Jones distances.
    """
    n = pos.shape[0]
    acc[:, :] = 0.0
    acc_ext[:, :] = 0.0
    drho[:] = 0.0
    pr = np.empty(n)
    for i in range(n):
        pr[i] = p[i] / (rho[i] * rho[i]) if kind[i] != WAVEMAKER else 0.0
    inv_h = 1.0 / h
    cf = -5.0 * SIGMA * inv_h ** 5
    reach2 = 4.0 * h * h
    eh2 = eps * h * h
    diff2 = 2.0 * xi * h * c0
    lj_r02 = lj_r0 * lj_r0
    for i in range(n):
        ki = kind[i]
        ci = corrected[i] and use_correction
        mi = mass[i]
        rhoi = rho[i]
        pi = p[i]
        pri = pr[i]
        xi_ = pos[i, 0]
        yi = pos[i, 1]
        zi = pos[i, 2]
        uxi = vel[i, 0]
        uyi = vel[i, 1]
        uzi = vel[i, 2]
        gate_i = rhoi * gmag
        ax = 0.0
        ay = 0.0
        az = 0.0
        dri = 0.0
        for s in range(offsets[i], offsets[i + 1]):
            j = nbrs[s]
            kj = kind[j]
            c = image[s]
            dx = xi_ - pos[j, 0] + shifts[c, 0]
            dy = yi - pos[j, 1] + shifts[c, 1]
            dz = zi - pos[j, 2] + shifts[c, 2]
            r2 = dx * dx + dy * dy + dz * dz
            if ki == WAVEMAKER or kj == WAVEMAKER:
                if (ki == FLUID) == (kj == FLUID) or r2 >= lj_r02:
                    continue
                r = math.sqrt(r2)
                if r < 0.01 * lj_r0:
                    r = 0.01 * lj_r0
                    counters[1] += 1
                qq = lj_r0 / r
                mag = lj_d * (qq ** lj_p1 - qq ** lj_p2) / (r * r)
                # (dx, dy, dz) points from j to i
                if ki == FLUID:
                    acc_ext[i, 0] += mag * dx
                    acc_ext[i, 1] += mag * dy
                    acc_ext[i, 2] += mag * dz
                else:
                    acc_ext[j, 0] -= mag * dx
                    acc_ext[j, 1] -= mag * dy
                    acc_ext[j, 2] -= mag * dz
                continue
            if r2 >= reach2:
                continue
            q = math.sqrt(r2) * inv_h
            t = 1.0 - 0.5 * q
            f = cf * t * t * t
            mj = mass[j]
            rhoj = rho[j]
            udx = (uxi - vel[j, 0]) * dx + (uyi - vel[j, 1]) * dy + (uzi - vel[j, 2]) * dz

            dri += udx * f * mj
            drho[j] += udx * f * mi
            # density diffusion, gated on a non-hydrostatic pressure jump
            dp = abs(pi - p[j])
            adz = abs(dz)
            on_i = 1.0 if dp > gate_i * adz else 0.0
            on_j = 1.0 if dp > rhoj * gmag * adz else 0.0
            dri -= on_i * diff2 * (rhoj / rhoi - 1.0) * f * mj
            drho[j] -= on_j * diff2 * (rhoi / rhoj - 1.0) * f * mi

            if ki != FLUID and kj != FLUID:
                continue
            # artificial viscosity acts only on approaching pairs
            coef = (pri + pr[j] - visc * min(udx, 0.0) / (0.5 * (rhoi + rhoj) * (r2 + eh2))) * f
            cj = corrected[j] and use_correction
            if ci or cj:
                if ci:
                    s00 = A[i, 0, 0]
                    s01 = A[i, 0, 1]
                    s02 = A[i, 0, 2]
                    s11 = A[i, 1, 1]
                    s12 = A[i, 1, 2]
                    s22 = A[i, 2, 2]
                else:
                    s00 = 1.0
                    s01 = 0.0
                    s02 = 0.0
                    s11 = 1.0
                    s12 = 0.0
                    s22 = 1.0
                if cj:
                    s00 += A[j, 0, 0]
                    s01 += A[j, 0, 1]
                    s02 += A[j, 0, 2]
                    s11 += A[j, 1, 1]
                    s12 += A[j, 1, 2]
                    s22 += A[j, 2, 2]
                else:
                    s00 += 1.0
                    s11 += 1.0
                    s22 += 1.0
                c00 = s11 * s22 - s12 * s12
                c01 = s02 * s12 - s01 * s22
                c02 = s01 * s12 - s02 * s11
                det = s00 * c00 + s01 * c01 + s02 * c02
                tr = (s00 + s11 + s22) / 3.0
                if abs(det) > rtol * abs(tr * tr * tr):
                    c11 = s00 * s22 - s02 * s02
                    c12 = s01 * s02 - s00 * s12
                    c22 = s00 * s11 - s01 * s01
                    sc = coef * (w[i] + w[j]) / det
                    vx = sc * (c00 * dx + c01 * dy + c02 * dz)
                    vy = sc * (c01 * dx + c11 * dy + c12 * dz)
                    vz = sc * (c02 * dx + c12 * dy + c22 * dz)
                else:
                    counters[0] += 1
                    vx = coef * dx
                    vy = coef * dy
                    vz = coef * dz
            else:
                vx = coef * dx
                vy = coef * dy
                vz = coef * dz
            ax -= vx * mj
            ay -= vy * mj
            az -= vz * mj
            acc[j, 0] += vx * mi
            acc[j, 1] += vy * mi
            acc[j, 2] += vz * mi
        acc[i, 0] += ax
        acc[i, 1] += ay
        acc[i, 2] += az
        drho[i] += dri


@njit(cache=True, error_model="numpy")
def plane_push(pos, kind, points, normals, lj_d, lj_r0, lj_p1, lj_p2, out, counters):
    """Lennard-Jones accelerations of planes on fluid particles, added to out."""
    n = pos.shape[0]
    for i in range(n):
        if kind[i] != FLUID:
            continue
        for k in range(points.shape[0]):
            r = 0.0
            for d in range(3):
                r += (pos[i, d] - points[k, d]) * normals[k, d]
            if r >= lj_r0[k]:
                continue
            if r <= 0.0:
                r = 0.01 * lj_r0[k]
                counters[1] += 1
            q = lj_r0[k] / r
            mag = lj_d[k] * (q ** lj_p1[k] - q ** lj_p2[k]) / r
            for d in range(3):
                out[i, d] += mag * normals[k, d]
