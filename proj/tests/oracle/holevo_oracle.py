#!/usr/bin/env python3
"""Standalone high-precision reference for the key-rate regression constants.

Builds the symmetrized two-mode covariance matrix from measured preparation
statistics, solves the four-mode purification network analytically, pushes
mode B through the lossy/noisy channel and evaluates the Holevo bound by
direct eigendecomposition of i*Omega*gamma in multiprecision arithmetic
(mpmath). The C++ library never imports this; the test suite freezes the
printed constants.

Run:  python3 tests/oracle/holevo_oracle.py
"""

from mpmath import mp, mpf, sqrt, log, exp, eig, matrix, eye, fabs

mp.dps = 50

# mode ordering (x1,p1,x2,p2,...); vacuum variance = 1


def omega(n_modes):
    w = matrix(2 * n_modes, 2 * n_modes)
    for k in range(n_modes):
        w[2 * k, 2 * k + 1] = 1
        w[2 * k + 1, 2 * k] = -1
    return w


def symplectic_eigenvalues(gamma):
    n = gamma.rows // 2
    m = 1j * omega(n) * gamma
    ev = eig(m, left=False, right=False)
    mags = sorted((fabs(v) for v in ev), reverse=True)
    # spectrum comes in +/- pairs; keep one of each
    return [mags[2 * i] for i in range(n)]


def g_bits(nu):
    if nu <= 1 + mpf("1e-40"):
        return mpf(0)
    a = (nu + 1) / 2
    b = (nu - 1) / 2
    return a * log(a, 2) - b * log(b, 2)


def entropy_bits(gamma):
    return sum(g_bits(nu) for nu in symplectic_eigenvalues(gamma))


def epr(V):
    c = sqrt(V * V - 1)
    m = matrix(4, 4)
    for q in range(2):
        m[q, q] = V
        m[2 + q, 2 + q] = V
    m[0, 2] = m[2, 0] = c
    m[1, 3] = m[3, 1] = -c
    return m


def embed(block, modes, n_modes):
    s = eye(2 * n_modes)
    for bi, mi in enumerate(modes):
        for bj, mj in enumerate(modes):
            for a in range(2):
                for b in range(2):
                    s[2 * mi + a, 2 * mj + b] = block[2 * bi + a, 2 * bj + b]
    return s


def congruence(s, gamma):
    return s * gamma * s.T


def squeezer(s_par):
    m = matrix(2, 2)
    m[0, 0] = exp(-s_par)
    m[1, 1] = exp(s_par)
    return m


def beamsplitter(T):
    a, b = sqrt(T), sqrt(1 - T)
    m = matrix(4, 4)
    for q in range(2):
        m[q, q] = a
        m[q, 2 + q] = b
        m[2 + q, q] = b
        m[2 + q, 2 + q] = -a
    return m


def gamma_ab(VM, CMB, VB):
    """Equivalent symmetrized two-mode state; per quadrature
    C_AB = C_MB * sqrt((1+V_B)/V_M) and V_A = V_B."""
    cab = [CMB[q] * sqrt((1 + VB[q]) / VM[q]) for q in range(2)]
    m = matrix(4, 4)
    for q in range(2):
        m[q, q] = VB[q]
        m[2 + q, 2 + q] = VB[q]
        m[q, 2 + q] = m[2 + q, q] = cab[q]
    return m, cab


def solve_purification(VB, cab):
    dx, dp = VB[0] - cab[0], VB[1] - cab[1]
    sx, sp = VB[0] + cab[0], VB[1] + cab[1]
    assert dx > 0 and dp > 0 and sx > 0 and sp > 0
    V1 = sqrt(dx * dp)
    V2 = sqrt(sx * sp)
    s1 = log(dp / dx) / 4
    s2 = log(sp / sx) / 4
    return V1, V2, s1, s2


def place_state(gamma, block_cov, modes):
    for bi, mi in enumerate(modes):
        for bj, mj in enumerate(modes):
            for a in range(2):
                for b in range(2):
                    gamma[2 * mi + a, 2 * mj + b] = block_cov[2 * bi + a, 2 * bj + b]


def purify(VB, cab):
    """Four-mode network: EPR(V2) on (0,3), EPR(V1) on (1,2), squeezers on
    modes 0 and 1, balanced coupler on (0,1); output order (A,B,C,D)."""
    V1, V2, s1, s2 = solve_purification(VB, cab)
    gamma = eye(8)
    place_state(gamma, epr(V2), [0, 3])
    place_state(gamma, epr(V1), [1, 2])
    gamma = congruence(embed(squeezer(s2), [0], 4), gamma)
    gamma = congruence(embed(squeezer(s1), [1], 4), gamma)
    gamma = congruence(embed(beamsplitter(mpf(1) / 2), [0, 1], 4), gamma)
    return gamma, (V1, V2, s1, s2)


def apply_channel(gamma, mode, eta, eps):
    n = gamma.rows // 2
    out = matrix(gamma)
    se = sqrt(eta)
    for i in range(2 * n):
        for j in range(2 * n):
            ri = i // 2 == mode
            rj = j // 2 == mode
            if ri and rj:
                out[i, j] = eta * gamma[i, j]
                if i == j:
                    out[i, j] += eta * eps + (1 - eta)
            elif ri or rj:
                out[i, j] = se * gamma[i, j]
    return out


def drop_mode(gamma, mode):
    keep = [i for i in range(gamma.rows) if i // 2 != mode]
    out = matrix(len(keep), len(keep))
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            out[a, b] = gamma[i, j]
    return out


def condition_homodyne(gamma, mode, quad):
    q = 2 * mode + quad
    rest = [i for i in range(gamma.rows) if i // 2 != mode]
    v = gamma[q, q]
    out = matrix(len(rest), len(rest))
    for a, i in enumerate(rest):
        for b, j in enumerate(rest):
            out[a, b] = gamma[i, j] - gamma[i, q] * gamma[j, q] / v
    return out


def condition_heterodyne(gamma, mode):
    rest = [i for i in range(gamma.rows) if i // 2 != mode]
    blk = matrix(2, 2)
    for a in range(2):
        for b in range(2):
            blk[a, b] = gamma[2 * mode + a, 2 * mode + b]
            if a == b:
                blk[a, b] += 1
    det = blk[0, 0] * blk[1, 1] - blk[0, 1] * blk[1, 0]
    inv = matrix(2, 2)
    inv[0, 0] = blk[1, 1] / det
    inv[1, 1] = blk[0, 0] / det
    inv[0, 1] = -blk[0, 1] / det
    inv[1, 0] = -blk[1, 0] / det
    out = matrix(len(rest), len(rest))
    for a, i in enumerate(rest):
        for b, j in enumerate(rest):
            acc = mpf(0)
            for u in range(2):
                for w in range(2):
                    acc += gamma[i, 2 * mode + u] * inv[u, w] * gamma[j, 2 * mode + w]
            out[a, b] = gamma[i, j] - acc
    return out


def mutual_information(VM, CMB, VB, eta, eps, detection, quad=0):
    vbp = [eta * (VB[q] + eps) + (1 - eta) for q in range(2)]
    cp = [sqrt(eta) * CMB[q] for q in range(2)]
    if detection == "homodyne":
        den = vbp[quad] * VM[quad] - cp[quad] ** 2
        return log(1 + cp[quad] ** 2 / den, 2) / 2
    acc = mpf(1)
    for q in range(2):
        den = (vbp[q] + 1) * VM[q] - cp[q] ** 2
        acc *= 1 + cp[q] ** 2 / den
    return log(acc, 2) / 2


def holevo(VM, CMB, VB, eta, eps, detection, quad=0):
    gab, cab = gamma_ab(VM, CMB, VB)
    gamma, _ = purify(VB, cab)
    for q in range(2):  # reconstruction self-check
        assert fabs(gamma[q, q] - VB[q]) < mpf("1e-30")
        assert fabs(gamma[q, 2 + q] - cab[q]) < mpf("1e-30")
    for nu in symplectic_eigenvalues(gamma):
        assert fabs(nu - 1) < mpf("1e-30")
    gch = apply_channel(gamma, 1, eta, eps)
    s_e = entropy_bits(gch)
    if detection == "homodyne":
        cond = condition_homodyne(gch, 1, quad)
    else:
        cond = condition_heterodyne(gch, 1)
    s_e_b = entropy_bits(cond)
    return s_e, s_e_b, s_e - s_e_b


def key_rate(VM, CMB, VB, eta, eps, detection, quad=0):
    i_ab = mutual_information(VM, CMB, VB, eta, eps, detection, quad)
    s_e, s_e_b, chi = holevo(VM, CMB, VB, eta, eps, detection, quad)
    k = i_ab - chi
    if k < 0:
        k = mpf(0)
    return i_ab, s_e, s_e_b, chi, k


def db_to_eta(db):
    return mpf(10) ** (-mpf(db) / 10)


def fmt(x):
    return mp.nstr(x, 17, strip_zeros=False)


def main():
    VM = [mpf(9), mpf(9)]
    CMB = [mpf(9), mpf(-9)]
    perfect = [mpf(10), mpf(10)]

    print("== purification of the perfect scenario (TMSV V=10) ==")
    _, cab = gamma_ab(VM, CMB, perfect)
    V1, V2, s1, s2 = solve_purification(perfect, cab)
    print("C_AB_x =", fmt(cab[0]), " C_AB_p =", fmt(cab[1]))
    print("V1 =", fmt(V1), " V2 =", fmt(V2))
    print("s1 =", fmt(s1), " s2 =", fmt(s2))

    print("== identity-channel mutual information (eta=1, eps=0) ==")
    print("I_hom(x) =", fmt(mutual_information(VM, CMB, perfect, mpf(1), mpf(0), "homodyne")))
    print("I_het    =", fmt(mutual_information(VM, CMB, perfect, mpf(1), mpf(0), "heterodyne")))

    eps = mpf("0.07")
    print("== regression constants: perfect scenario, eps=0.07 ==")
    for det in ("homodyne", "heterodyne"):
        for db in (0, 3, 6, 9):
            i_ab, s_e, s_e_b, chi, k = key_rate(VM, CMB, perfect, db_to_eta(db), eps, det)
            print(f"{det} {db} dB: I_AB={fmt(i_ab)} S_E={fmt(s_e)} S_E_B={fmt(s_e_b)} chi={fmt(chi)} K={fmt(k)}")

    print("== estimator reference: heterodyne 3 dB, eps=0 ==")
    i_ab, s_e, s_e_b, chi, k = key_rate(VM, CMB, perfect, db_to_eta(3), mpf(0), "heterodyne")
    print("I_AB =", fmt(i_ab), " chi =", fmt(chi), " K =", fmt(k))
    vbp = db_to_eta(3) * 10 + 1 - db_to_eta(3)
    print("V_B' =", fmt(vbp), " C' =", fmt(sqrt(db_to_eta(3)) * 9))

    variants = {
        "perfect": perfect,
        "noise_p": [mpf(10), mpf("10.1")],
        "noise_x": [mpf("10.1"), mpf(10)],
        "noise_both": [mpf("10.1"), mpf("10.1")],
    }
    # The homodyne "overlap" of the perfect and noise_p curves is not exact:
    # a systematic gap of order 1e-4 bits remains (largest near 1.4 dB).
    # The heterodyne noise_x/noise_p symmetry is exact to working precision.
    print("== overlap gaps at sample grid points (eps=0.07) ==")
    for db in (0, mpf("1.4"), 3, 6, 9, 12, 15):
        eta = db_to_eta(db)
        kh = {n: key_rate(VM, CMB, vb, eta, eps, "homodyne")[4] for n, vb in variants.items()}
        kt = {n: key_rate(VM, CMB, vb, eta, eps, "heterodyne")[4] for n, vb in variants.items()}
        print(f"{db} dB hom |perfect-noise_p|={fmt(fabs(kh['perfect'] - kh['noise_p']))} "
              f"|noise_x-noise_both|={fmt(fabs(kh['noise_x'] - kh['noise_both']))}")
        print(f"{db} dB het |noise_x-noise_p|={fmt(fabs(kt['noise_x'] - kt['noise_p']))} "
              f"het K perfect={fmt(kt['perfect'])} noise_x={fmt(kt['noise_x'])} both={fmt(kt['noise_both'])} "
              f"hom K perfect={fmt(kh['perfect'])}")


if __name__ == "__main__":
    main()
