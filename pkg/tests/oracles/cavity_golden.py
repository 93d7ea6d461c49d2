"""Standalone 50-digit evaluation of the steady-state amplitudes and couplings.

Written from the closed-form expressions using the phase sums directly
(e^{i(phi_a + phi_b)}), independent of the package code path which multiplies
per-fiber traversal factors. Run it to regenerate the frozen values in
tests/test_cavity_model.py::GOLDEN.

    python tests/oracles/cavity_golden.py
"""
import mpmath as mp

mp.mp.dps = 50


def golden(g, delta, gamma0, eps, phi):
    e1, e2, e3 = [mp.mpf(x) for x in eps]
    p12, p21, p23, p32 = phi
    g, delta, gamma0 = mp.mpf(g), mp.mpf(delta), mp.mpf(gamma0)
    I = mp.mpc(0, 1)
    ex = lambda a: mp.exp(I * a)

    chi = g**2 / delta
    M = I * delta + gamma0
    W2 = gamma0**2 * (ex(p21 + p12) + ex(p32 + p23))
    theta13, Phi1 = p12 + p23, p23 + p32
    theta31, Phi3 = p32 + p21, p21 + p12
    den = M**2 - W2

    a1 = (e1 * M**2 + e2 * M * gamma0 * ex(p12)
          + gamma0**2 * (e3 * ex(theta13) - e1 * ex(Phi1))) / (M * den)
    a2 = (e2 * M + gamma0 * (e1 * ex(p21) + e3 * ex(p23))) / den
    a3 = (e3 * M**2 + e2 * M * gamma0 * ex(p32)
          + gamma0**2 * (e1 * ex(theta31) - e3 * ex(Phi3))) / (M * den)

    j12 = 2 * gamma0 * chi**2 * mp.im(a1 * mp.conj(a2) * ex(p21) / den)
    j23 = 2 * gamma0 * chi**2 * mp.im(a3 * mp.conj(a2) * ex(p32) / den)
    j31 = 2 * gamma0 * chi**2 * mp.im(
        gamma0 * a3 * mp.conj(a1) * ex(p23 + p12) / (M * den))
    return (a1, a2, a3), (j12, j23, j31), abs(den)


if __name__ == "__main__":
    q = mp.pi / 4
    alpha, j, pole = golden(1, 10.5, 10, (2, 2, 2), (q, q, q, q))
    for k, a in enumerate(alpha, 1):
        print(f"alpha{k} = complex({mp.nstr(mp.re(a), 17)}, {mp.nstr(mp.im(a), 17)})")
    for name, v in zip(("j12", "j23", "j31"), j):
        print(f"{name} = {mp.nstr(v, 17)}")
    print(f"pole_distance = {mp.nstr(pole, 17)}")
