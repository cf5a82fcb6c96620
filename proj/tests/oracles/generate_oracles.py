#!/usr/bin/env python3
"""Independent oracles for the derived values used by the C++ test suites.

Everything here is computed by a route that shares no code with the library:
  * symbolic expansion (sympy) for compositions, fibers and classifications;
  * the literal limit log||F^n(Z)|| / d^n in 80-digit arithmetic (mpmath) for
    escape rates and potentials, instead of the renormalized series;
  * a from-scratch Philox4x32-10 for the RNG stream test vectors.

Run from the repository root:
    python3 tests/oracles/generate_oracles.py > tests/golden/oracles.json
"""

import json
import math

import mpmath as mp
import sympy as sp

mp.mp.dps = 80
z = sp.symbols("z")

SUITE = {
    "z2": (z**2, sp.Integer(1)),
    "z2m1": (z**2 - 1, sp.Integer(1)),
    "inv_z2": (sp.Integer(1), z**2),
    "inv_z3": (sp.Integer(1), z**3),
    "special_2_1_3": (2 + (z - 1) ** 3, (z - 1) ** 3),
    "cubic_pole": (z**3 + sp.Rational(1, 10), z),
}

PROBES = [complex(0.3, 0.2), complex(1.5, 0), complex(-2, 1), complex(0, 3), complex(1, 1)]


def coeffs(expr):
    p = sp.Poly(sp.expand(expr), z)
    c = list(reversed(p.all_coeffs()))
    return [complex(sp.N(x, 30)) for x in c]


def canonical_lift(num, den):
    """(F0, F1) coefficient lists, index j <-> z0^(d-j) z1^j, max |coeff| = 1."""
    n, m = coeffs(num), coeffs(den)
    d = max(len(n), len(m)) - 1
    n += [0] * (d + 1 - len(n))
    m += [0] * (d + 1 - len(m))
    s = max(abs(x) for x in n + m)
    f0 = [mp.mpc(x.real, x.imag) / s for x in m]
    f1 = [mp.mpc(x.real, x.imag) / s for x in n]
    return f0, f1, d


def apply(f, z0, z1):
    f0, f1, d = f
    a = sum(f0[j] * z0 ** (d - j) * z1**j for j in range(d + 1))
    b = sum(f1[j] * z0 ** (d - j) * z1**j for j in range(d + 1))
    return a, b


def escape_rate(f, z0, z1):
    """Literal limit log||F^n(Z)|| / d^n with n large enough that the O(d^-n)
    error is far below double precision."""
    d = f[2]
    n = int(math.ceil(22 * math.log(10) / math.log(d)))
    a, b = mp.mpc(z0), mp.mpc(z1)
    for _ in range(n):
        a, b = apply(f, a, b)
    return float(mp.log(mp.sqrt(abs(a) ** 2 + abs(b) ** 2)) / mp.mpf(d) ** n)


def potential(f, w):
    return escape_rate(f, 1, w) - escape_rate(f, 0, 1)


def escape_oracles():
    out = {}
    for name, (num, den) in SUITE.items():
        f = canonical_lift(num, den)
        entry = {
            "base_height": escape_rate(f, 0, 1),
            "probes": [[w.real, w.imag] for w in PROBES],
            "potential": [potential(f, mp.mpc(w.real, w.imag)) for w in PROBES],
        }
        out[name] = entry
    return out


def pullback_sides(name, n, w):
    """Both sides of p(f^n w) + log|F_0^(n)(1,w)| = d^n p(w) + (d^n - 1) G(0,1)."""
    num, den = SUITE[name]
    f = canonical_lift(num, den)
    d = f[2]
    a, b = mp.mpc(1), mp.mpc(w.real, w.imag)
    for _ in range(n):
        a, b = apply(f, a, b)
    g01 = escape_rate(f, 0, 1)
    fn = b / a
    lhs = potential(f, fn) + float(mp.log(abs(a)))
    rhs = d**n * potential(f, mp.mpc(w.real, w.imag)) + (d**n - 1) * g01
    return {"map": name, "n": n, "z": [w.real, w.imag], "lhs": lhs, "rhs": rhs}


def composition_oracles():
    f = z**2 - 1
    ff = sp.expand(f.subs(z, f))
    return {"z2m1_second_iterate_numerator": [float(c) for c in reversed(sp.Poly(ff, z).all_coeffs())]}


def fiber_oracles():
    # (z^3 + 0.1)/z over infinity: finite part is the denominator's roots; the
    # degree drop d - deg(den) is the multiplicity at infinity.
    num, den = SUITE["cubic_pole"]
    d = 3
    den_roots = sp.roots(sp.Poly(den, z))
    # f^2 denominator: f(f(z)) = N(f)/D(f); reduce and read its degree
    f = num / den
    f2 = sp.cancel(sp.together(f.subs(z, f)))
    _, f2_den = sp.fraction(f2)
    return {
        "cubic_pole_fiber_over_inf": {
            "finite": [[float(sp.re(r)), float(sp.im(r)), int(m)] for r, m in den_roots.items()],
            "infinity_multiplicity": int(d - sp.degree(den, z)),
        },
        "cubic_pole_f2_denominator_degree": int(sp.degree(f2_den, z)),
        "inv_z2_f2_denominator_degree": int(
            sp.degree(sp.fraction(sp.cancel(sp.together((1 / z**2).subs(z, 1 / z**2))))[1], z)
        ),
    }


def tree_oracles():
    # roots of (z^2 - 1)^2 - 1 = 10  <=>  z^2 = 1 +- sqrt(11)
    roots = []
    for s in (1, -1):
        w = mp.sqrt(mp.mpc(1 + s * mp.sqrt(11)))
        roots += [w, -w]
    return {"z2m1_tree_z0_10_depth2": sorted([[float(r.real), float(r.imag)] for r in roots])}


def lemniscate_oracles():
    # 2/(z-1)^3 + 1: Julia set is the circle |z - 1| = 2^(1/4) (conjugate of
    # w -> 2 w^-3 whose square is w^9 / 4), so I = log 2^(1/4).
    num, den = SUITE["special_2_1_3"]
    f = canonical_lift(num, den)
    g01 = escape_rate(f, 0, 1)
    energy = math.log(2.0) / 4
    d = 3
    c = math.exp(-(d - 1) * (energy + g01))
    # |c * F_0(1, z)| = |c| |z - 1|^3 / 3 = 1 on the lemniscate
    radius = (3.0 / c) ** (1.0 / 3.0)
    g_inv = canonical_lift(*SUITE["inv_z2"])
    return {
        "special_2_1_3": {
            "base_height": g01,
            "energy": energy,
            "c": c,
            "lemniscate_radius": radius,
            "julia_radius": 2 ** 0.25,
        },
        "inv_z2": {"base_height": escape_rate(g_inv, 0, 1), "energy": 0.0, "c": 1.0},
    }


# --- Philox4x32-10, written from the published round function -------------

M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK = 0xFFFFFFFF


def philox4x32_10(ctr, key):
    c = list(ctr)
    k = list(key)
    for r in range(10):
        if r:
            k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
        p0 = M0 * c[0]
        p1 = M1 * c[2]
        c = [
            ((p1 >> 32) ^ c[1] ^ k[0]) & MASK,
            p1 & MASK,
            ((p0 >> 32) ^ c[3] ^ k[1]) & MASK,
            p0 & MASK,
        ]
    return c


def stream_doubles(seed, stream, count):
    """Stream layout used by the library: key = seed (lo, hi words), counter =
    (block lo, block hi, stream lo, stream hi). Each block yields two 64-bit
    words (w1 << 32 | w0, w3 << 32 | w2); doubles take the top 53 bits."""
    out = []
    block = 0
    while len(out) < count:
        r = philox4x32_10(
            [block & MASK, block >> 32, stream & MASK, stream >> 32], [seed & MASK, seed >> 32]
        )
        for u in ((r[1] << 32) | r[0], (r[3] << 32) | r[2]):
            out.append((u >> 11) * 2.0**-53)
        block += 1
    return out[:count]


def rng_oracles():
    kat_in = [
        ([0, 0, 0, 0], [0, 0]),
        ([MASK] * 4, [MASK] * 2),
        ([0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344], [0xA4093822, 0x299F31D0]),
    ]
    return {
        "philox_kat": [
            {"ctr": c, "key": k, "out": philox4x32_10(c, k)} for c, k in kat_in
        ],
        "stream_42_0_first3": stream_doubles(42, 0, 3),
        "stream_42_1_first3": stream_doubles(42, 1, 3),
    }


def main():
    out = {
        "generator": "tests/oracles/generate_oracles.py",
        "escape": escape_oracles(),
        "pullback": [
            pullback_sides("z2", 1, complex(2, 0)),
            pullback_sides("inv_z2", 2, complex(2, 0)),
            pullback_sides("cubic_pole", 1, complex(1, 1)),
        ],
        "composition": composition_oracles(),
        "fibers": fiber_oracles(),
        "tree": tree_oracles(),
        "lemniscate": lemniscate_oracles(),
        "rng": rng_oracles(),
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
