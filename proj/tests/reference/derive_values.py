"""High-precision reference values frozen into the C++ tests (mpmath, 50 digits)."""
import mpmath as mp

mp.mp.dps = 50


def erfi_series(z, terms=200):
    return 2 / mp.sqrt(mp.pi) * mp.nsum(lambda k: z ** (2 * k + 1) / (mp.factorial(k) * (2 * k + 1)), [0, terms])


def energy(n, a1, a3, a4):
    return -a1**2 * a4**2 / (a3 + 2 * (n + 1) * a4) ** 2


def gup_energy_by_root(n, eps, a1, beta):
    sb = mp.sqrt(beta)

    def cond(A):
        return a1 * (1 + 2 * sb * A - 2 * beta * eps) + 2 * (n + 2) * A

    A = mp.findroot(cond, 0.1)
    return beta * eps**2 - A**2


def gup_energy_closed(n, eps, a1, beta):
    return -(a1**2 / 4) * ((2 * beta * eps - 1) / (a1 * mp.sqrt(beta) + n + 2)) ** 2 + beta * eps**2


def ground_gup(a1, beta):
    sb = mp.sqrt(beta)

    def f(a2, a3, a4):
        e = energy(0, a1, a3, a4)
        eg = gup_energy_closed(0, e, a1, beta)
        A = mp.sqrt(beta * e**2 - eg)
        D = 2 * sb * A - 2 * beta * e + 1
        return [a2 - (2 + 3 * sb * a1) / D, a3 - 2 * sb * a2 / D, a4**2 - sb * a3 / D]

    a2 = 2 + 3 * sb * a1
    a3 = 2 * sb * a2
    return mp.findroot(f, (a2, a3, mp.sqrt(sb * a3)))


def excited_gup(a1, beta, seed):
    sb = mp.sqrt(beta)

    def f(a2, a3, a4, x):
        e = energy(1, a1, a3, a4)
        eg = gup_energy_closed(1, e, a1, beta)
        A = mp.sqrt(beta * e**2 - eg)
        den = -2 * sb * A + 2 * beta * e - 1
        return [
            a2 - (2 * x * A - 5 * a1 * sb - 6) / den,
            a3 - (2 * x**2 * A - 2 * sb * (2 * a2 + a1 * x) - 4 * x) / den,
            a4**2 - (2 * x**3 * A - sb * (3 * a3 + 2 * (a2 + a1 * x) * x) - 4 * x**2) / den,
            A * x**4 - (2 + a1 * sb) * x**3 - sb * (a2 * x**2 + a3 * x + a4**2),
        ]

    return mp.findroot(f, seed)


def z_integral(a1, a3, a4, T, nu):
    K = a1**2 * a4**2 / T
    xi1 = a3 + 2 * a4
    return mp.quad(lambda x: mp.exp(K / (xi1 + 2 * a4 * x) ** 2), mp.linspace(0, nu, 11))


if __name__ == "__main__":
    for z in ["1", "0.3", "2.5", "-4.7"]:
        print("erfi", z, mp.nstr(erfi_series(mp.mpf(z)), 20))
    print("gup_energy(0,-0.01,-0.5,1) root", mp.nstr(gup_energy_by_root(0, mp.mpf("-0.01"), mp.mpf("-0.5"), 1), 20))
    print("gup_energy closed", mp.nstr(gup_energy_closed(0, mp.mpf("-0.01"), mp.mpf("-0.5"), 1), 20))
    for a1, b in [("-0.5", "1"), ("-0.3", "0.5"), ("-0.1", "0.5")]:
        print("ground", a1, b, [mp.nstr(v, 17) for v in ground_gup(mp.mpf(a1), mp.mpf(b))])
    print("excited", [mp.nstr(v, 17) for v in excited_gup(mp.mpf("-0.3"), mp.mpf("0.5"), (1.2144, 1.5305, 0.9824, 33.62))])
    g1 = [mp.mpf(s) for s in ("-0.1", "-0.0097", "0.0053")]
    e0 = energy(0, *g1)
    print("G1 eps0", mp.nstr(e0, 20))
    a1, a3, a4 = g1
    print("G1 alpha2 closed", mp.nstr((a3**2 + 2 * a3 * a4 - 8 * a4**3 * mp.sqrt(-e0)) / (4 * a4**2), 20))
    print("E1 eps1", mp.nstr(energy(1, mp.mpf("-0.2"), mp.mpf("-0.0002"), mp.mpf("0.0029")), 20))
    print("G1 integral T=1 nu=10", mp.nstr(z_integral(*g1, 1, 10), 20))
    print("G1 Zdirect T=1 nu=10", mp.nstr(mp.fsum(mp.exp(-energy(n, *g1)) for n in range(11)), 20))
