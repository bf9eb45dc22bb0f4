"""Independent high-precision oracles used to pin expected values.

Everything here goes through mpmath power series with a cancellation guard,
or brute-force quadrature -- deliberately avoiding the evaluation paths used
inside the package.
"""

from __future__ import annotations

import mpmath as mp


def wright_oracle(nu: float, delta: float, z: float) -> float:
    """phi(-nu, delta; -z) by adaptive-precision Taylor summation."""
    c = (1 - nu) * nu ** (nu / (1 - nu))
    guard = int(0.9 * c * z ** (1.0 / (1.0 - nu))) + 40
    if guard > 400:
        raise ValueError("oracle too expensive here; use a frozen value")
    old = mp.mp.dps
    mp.mp.dps = guard
    try:
        s = mp.mpf(0)
        zz = mp.mpf(z)
        n = 0
        small = 0
        while n <= 30000:
            term = (-zz) ** n * mp.rgamma(mp.mpf(delta) - mp.mpf(nu) * n) / mp.factorial(n)
            s += term
            if n > 8 and abs(term) < mp.mpf(10) ** (-guard + 6) * max(
                abs(s), mp.mpf(10) ** -320
            ):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
            n += 1
        return float(s)
    finally:
        mp.mp.dps = old


def ml_oracle(a: float, b: float, z: float) -> float:
    """E_{a,b}(z) by adaptive-precision Taylor summation."""
    guard = int(0.45 * abs(z) ** (1.0 / a)) + 40
    if guard > 400:
        raise ValueError("oracle too expensive here; use a frozen value")
    old = mp.mp.dps
    mp.mp.dps = guard
    try:
        s = mp.mpf(0)
        zz = mp.mpf(z)
        n = 0
        small = 0
        while n <= 30000:
            term = zz ** n * mp.rgamma(mp.mpf(a) * n + mp.mpf(b))
            s += term
            if n > 8 and abs(term) < mp.mpf(10) ** (-guard + 6) * max(
                abs(s), mp.mpf(10) ** -320
            ):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
            n += 1
        return float(s)
    finally:
        mp.mp.dps = old


# Frozen oracle values (computed with the functions above at build time;
# the expensive small-a / large-z corners would be too slow to recompute
# on every test run).

#: (a, b, z) -> E_{a,b}(z)
ML_FROZEN = {
    (0.6, 1.0, -1.0): 0.413327340943106303,
    (0.6, 1.0, -5.0): 0.0951178464387546219,
    (0.6, 1.0, -15.0): 0.0307594912564634788,
    (0.6, 2.0, -1.0): 0.568884460937494452,
    (0.6, 2.0, -5.0): 0.193196906176117317,
    (0.6, 2.0, -15.0): 0.0713896748643568779,
    (0.75, 1.0, -1.0): 0.39310830281575404,
    (0.75, 1.0, -5.0): 0.0679239743326439382,
    (0.75, 1.0, -15.0): 0.0197153470282390162,
    (0.75, 1.0, -35.0): 0.00811665576046661109,
    (0.75, 1.0, -50.0): 0.00563118786294513024,
    (0.75, 2.0, -1.0): 0.590195890309494933,
    (0.75, 2.0, -5.0): 0.196643583977130581,
    (0.75, 2.0, -15.0): 0.0709834659490311483,
    (0.75, 2.0, -35.0): 0.0310564763062477668,
    (0.75, 2.0, -50.0): 0.0218379463236248529,
    (0.8, 1.0, -1.0): 0.386948578618976846,
    (0.8, 1.0, -5.0): 0.0575953847621522443,
    (0.8, 1.0, -15.0): 0.0158438007477907979,
    (0.8, 1.0, -35.0): 0.00645345073013951692,
    (0.8, 1.0, -50.0): 0.00446777615790299226,
    (1.2, 1.0, -1.0): 0.363512601950518906,
    (1.2, 1.0, -5.0): -0.0729601763057592017,
    (1.2, 1.0, -15.0): -0.0134557074017087633,
    (1.2, 1.0, -35.0): -0.00524355718873390741,
    (1.2, 1.0, -50.0): -0.00359568269523304379,
    (1.2, 2.0, -1.0): 0.671694541375729089,
    (1.2, 2.0, -5.0): 0.19704662557684656,
    (1.2, 2.0, -15.0): 0.0585708664607786411,
    (1.2, 2.0, -35.0): 0.0247709803183607653,
    (1.2, 2.0, -50.0): 0.0172897812504092033,
    (1.5, 1.0, -1.0): 0.396629365318088084,
    (1.5, 1.0, -5.0): -0.300082050413130881,
    (1.5, 1.0, -15.0): 0.015536484967868308,
    (1.5, 1.0, -35.0): -0.0142338000431281654,
    (1.5, 1.0, -50.0): -0.00457838510583927799,
    (1.5, 2.0, -1.0): 0.737482247901894714,
    (1.5, 2.0, -5.0): 0.204564443006479476,
    (1.5, 2.0, -15.0): 0.0268900680464070148,
    (1.5, 2.0, -35.0): 0.0164694095047574958,
    (1.5, 2.0, -50.0): 0.0111676697458510651,
    (1.9, 1.5, -1.0): 0.818274039665623498,
    (1.9, 1.5, -5.0): 0.000427605700871697019,
    (1.9, 1.5, -15.0): -0.376232309005681614,
    (1.9, 1.5, -35.0): 0.187118970561123186,
    (1.9, 1.5, -50.0): 0.145266214997149971,
}

#: (nu, delta, z) -> phi(-nu, delta; -z)
WRIGHT_FROZEN = {
    (0.3, 0.7, 0.5): 0.561001648731664257,
    (0.3, 0.7, 2.0): 0.168400306226783122,
    (0.3, 0.7, 5.0): 0.00646653921451913419,
    (0.3, 0.7, 12.0): 1.5854514649458867e-7,
    (0.3, 0.7, 25.0): 2.53205563380282394e-19,
    (0.375, 0.375, 0.5): 0.393727839237700668,
    (0.375, 0.375, 2.0): 0.17545271874705989,
    (0.375, 0.375, 5.0): 0.00610106928068165642,
    (0.375, 0.375, 12.0): 6.37331449733999135e-9,
    (0.375, 0.375, 25.0): 8.11120896719715382e-27,
    (0.375, 0.625, 0.5): 0.550367914281227366,
    (0.375, 0.625, 2.0): 0.18087950951053674,
    (0.375, 0.625, 5.0): 0.00462917178828015361,
    (0.375, 0.625, 12.0): 3.46921018307529081e-9,
    (0.375, 0.625, 25.0): 3.30672794543090014e-27,
    (0.375, 1.625, 0.5): 0.667079862612134187,
    (0.375, 1.625, 2.0): 0.113222307571543739,
    (0.375, 1.625, 5.0): 0.00119655220859045302,
    (0.375, 1.625, 12.0): 2.81226487072451644e-10,
    (0.375, 1.625, 25.0): 8.89284162881259393e-29,
    (0.4, 0.6, 0.5): 0.546663881329695851,
    (0.4, 0.6, 2.0): 0.185582274510109151,
    (0.4, 0.6, 5.0): 0.00389660637991025994,
    (0.4, 0.6, 12.0): 5.01079432955698381e-10,
    (0.4, 0.6, 25.0): 2.03102399041301566e-31,
    (0.5, 1.0, 0.5): 0.723673609831763067,
    (0.5, 1.0, 2.0): 0.157299207050285131,
    (0.5, 1.0, 5.0): 0.00040695201744495894,
    (0.5, 1.0, 12.0): 2.15197367124989131e-17,
    (0.5, 1.0, 25.0): 6.23194278197991101e-70,
    (0.75, 0.75, 0.5): 0.779992154271564862,
    (0.75, 0.75, 2.0): 0.0901671772972010345,
    (0.75, 0.75, 5.0): 4.99692187149255502e-30,
    (0.75, 0.25, 0.5): 0.445024841238736698,
    (0.75, 0.25, 2.0): 0.225140070148967499,
    (0.75, 0.25, 5.0): 7.05323421518392381e-29,
    (0.75, -0.75, 0.5): -0.475286768918943902,
    (0.75, -0.75, 2.0): 0.811685404361707017,
    (0.75, -0.75, 5.0): 1.38423574808332391e-26,
    (0.9, 0.55, 0.5): 0.783940995804692536,
    (0.9, 0.55, 2.0): 5.53313110086212776e-18,
}
