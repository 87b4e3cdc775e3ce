"""Independent reference values for the C++ test suite.

Recomputes the reference-device JSA with QUADPACK and numpy's SVD, and writes
the numbers the tests pin to oracle_values.hpp. Run once; the header is
committed.

    python3 tests/oracle/oracle.py > tests/oracle/oracle_values.hpp
"""

import math
import sys
import warnings

import numpy as np
from scipy import integrate

C = 299792458.0


def omega(lam_nm):
    return 2 * math.pi * C / (lam_nm * 1e-9)


TAU_E = {"p": 24.8e-12, "s": 23.7e-12, "i": 25.9e-12}
TAU_T = {"p": 9.6e-12, "s": 9.3e-12, "i": 10.0e-12}
W0 = {"p": omega(1555.32), "s": omega(1561.60), "i": omega(1549.08)}
PERIM = 92.12e-6
T_RT = 1.0 / 800e9


def fe(w, b):
    return 1j * math.sqrt(2 / TAU_E[b]) / (math.sqrt(T_RT) * (1 / TAU_T[b] - 1j * (w - W0[b])))


def pump_sigma(fwhm_pm):
    lam = 1555.32e-9
    dw = 2 * math.pi * C * fwhm_pm * 1e-12 / lam**2
    return dw / (2 * math.sqrt(2 * math.log(2)))


def autoconv(S, sigma):
    # A(w) = exp(-(w - wp)^2 / (4 sigma^2)); integrand symmetric about S/2
    wp = W0["p"]

    def f(x, part):
        w1, w2 = S / 2 + x, S / 2 - x
        v = fe(w1, "p") * fe(w2, "p") * math.exp(-((w1 - wp) ** 2 + (w2 - wp) ** 2) / (4 * sigma**2))
        return v.real if part == 0 else v.imag

    h = 12 * sigma * math.sqrt(2)
    brk = [0.0]
    re = integrate.quad(f, -h, h, args=(0,), epsabs=0, epsrel=1e-12, limit=400, points=brk)[0]
    im = integrate.quad(f, -h, h, args=(1,), epsabs=0, epsrel=1e-12, limit=400, points=brk)[0]
    return re + 1j * im


def jsa(ws, wi, fwhm_pm):
    sigma = pump_sigma(fwhm_pm)
    S = ws[:, None] + wi[None, :]
    sums, inv = np.unique(np.round((S - 2 * W0["p"]) / 1e3).astype(np.int64), return_inverse=True)
    vals = np.array([autoconv(2 * W0["p"] + k * 1e3, sigma) for k in sums])
    ac = vals[inv].reshape(S.shape)
    return fe(ws, "s")[:, None] * fe(wi, "i")[None, :] * ac


def schmidt(phi, ds, di):
    sv = np.linalg.svd(phi * math.sqrt(ds * di), compute_uv=False)
    p = sv**2 / np.sum(sv**2)
    return 1.0 / np.sum(p**2)


def dense_grid(points=201, halfwidths=16.0):
    h = halfwidths * max(1 / TAU_T["s"], 1 / TAU_T["i"])
    ws = np.linspace(W0["s"] - h, W0["s"] + h, points)
    wi = np.linspace(W0["i"] - h, W0["i"] + h, points)
    return ws, wi


def campaign_grid():
    hs, hi = 4 / TAU_T["s"], 4 / TAU_T["i"]
    return np.linspace(W0["s"] - hs, W0["s"] + hs, 10), np.linspace(W0["i"] - hi, W0["i"] + hi, 20)


def pair_k(ws, wi, fwhm_pm):
    phi = jsa(ws, wi, fwhm_pm)
    ds, di = ws[1] - ws[0], wi[1] - wi[0]
    return schmidt(phi, ds, di), schmidt(np.abs(phi), ds, di)


def spiral_null_nm():
    # sinc(dk L / 2) with dk = -k2 (ws - wp)^2 - k2 (wi - wp)^2 + 0 for degenerate CW pump:
    # first zero at k2 dw^2 L / 2 = pi, dw = ws - wp = wp - wi
    L, k2 = 2.35e-3, 1e-24
    dw = math.sqrt(2 * math.pi / (k2 * L))
    lam_s = 2 * math.pi * C / (W0["p"] - dw) * 1e9
    lam_i = 2 * math.pi * C / (W0["p"] + dw) * 1e9
    return dw, lam_s - lam_i


def main():
    warnings.simplefilter("ignore", integrate.IntegrationWarning)
    out = sys.stdout
    out.write("#pragma once\n\n// Generated by tests/oracle/oracle.py (scipy QUADPACK + numpy SVD).\n\n")
    out.write("namespace oracle {\n\n")
    ws, wi = dense_grid()
    kc, ki = pair_k(ws, wi, 250.0)
    out.write(f"inline constexpr double kDenseK250 = {kc:.12g};\n")
    out.write(f"inline constexpr double kDenseKIntensity250 = {ki:.12g};\n")
    for pm in (50.0, 5.0):
        kc2, _ = pair_k(ws, wi, pm)
        out.write(f"inline constexpr double kDenseK{int(pm)} = {kc2:.12g};\n")
    cs, ci = campaign_grid()
    kc, ki = pair_k(cs, ci, 250.0)
    out.write(f"inline constexpr double kCampaignK250 = {kc:.12g};\n")
    out.write(f"inline constexpr double kCampaignKIntensity250 = {ki:.12g};\n")
    sigma = pump_sigma(250.0)
    a0 = autoconv(2 * W0["p"], sigma)
    a1 = autoconv(2 * W0["p"] + 2e11, sigma)
    out.write(f"inline constexpr double kAutoconvCentreRe = {a0.real:.15g};\n")
    out.write(f"inline constexpr double kAutoconvCentreIm = {a0.imag:.15g};\n")
    out.write(f"inline constexpr double kAutoconvOffsetRe = {a1.real:.15g};\n")
    out.write(f"inline constexpr double kAutoconvOffsetIm = {a1.imag:.15g};\n")
    out.write(f"inline constexpr double kAutoconvSigma = {sigma:.15g};\n")
    dw, sep = spiral_null_nm()
    out.write(f"inline constexpr double kSpiralNullDetuning = {dw:.15g};\n")
    out.write(f"inline constexpr double kSpiralNullSeparationNm = {sep:.12g};\n")
    out.write("\n}  // namespace oracle\n")


if __name__ == "__main__":
    main()
