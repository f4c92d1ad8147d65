#!/usr/bin/env python3
"""Independent constant-folding oracle for values frozen into the Rust tests.

Evaluates every closed-form value with mpmath at 50 digits, using its own
copy of the CODATA 2018 constants. Run:  python3 tools/oracle_values.py
"""
from mpmath import mp, mpf, pi, sqrt, exp, factorial, nsum, inf, sin

mp.dps = 50

C = mpf("299792458")
G = mpf("6.67430e-11")
HBAR = mpf("1.054571817e-34")


def vacuum_coupling(nu, volume):
    return (1 / C) * sqrt(8 * pi * G * HBAR / (volume * nu))


def lam(mass, length, nu):
    return mass * length * nu**2 / pi**2


def zero_point(mass, omega0):
    return sqrt(HBAR / (mass * omega0))


def interaction_coefficient(mass, length, nu, omega0):
    return (length / pi**2) * sqrt(mass * nu**4 * HBAR / omega0)


def energy_density(nu, h0):
    return C**2 / (32 * pi * G) * nu**2 * h0**2


def poisson_tail(mean, start):
    return nsum(lambda n: exp(-mean) * mean**n / factorial(n), [start, inf])


if __name__ == "__main__":
    two_pi = 2 * pi
    print("vacuum_coupling(nu=2pi*5000, V=1)       =", mp.nstr(vacuum_coupling(two_pi * 5000, 1), 17))
    print("lambda(M=1000, L=1, nu=2pi*1000)        =", mp.nstr(lam(1000, 1, two_pi * 1000), 17))
    print("zero_point(M=1000, omega0=2pi*1000)     =", mp.nstr(zero_point(1000, two_pi * 1000), 17))
    print("coefficient(M=1000,L=1,nu=w0=2pi*1000)  =", mp.nstr(interaction_coefficient(1000, 1, two_pi * 1000, two_pi * 1000), 17))
    print("energy_density(nu=2pi*1000, h0=1e-21)   =", mp.nstr(energy_density(two_pi * 1000, mpf("1e-21")), 17))
    print("poisson_tail(|a|^2=25, n>=10)           =", mp.nstr(poisson_tail(25, 10), 17))
    print("poisson_tail(|a|^2=4, n>=40)            =", mp.nstr(poisson_tail(4, 40), 17))
    # Dyson resonant value g^2 |a|^2 t^2 for g=1e-3, |a|=2, t=10
    print("dyson resonant (g=1e-3,|a|=2,t=10)      =", mp.nstr(mpf("1e-3")**2 * 4 * 100, 17))
    # off-resonant closed form 4 g^2 |a|^2 sin^2(d t/2)/d^2, g=1e-3, |a|=2, d=0.3, t=7
    d, t = mpf("0.3"), mpf(7)
    print("dyson closed form (d=0.3,t=7)           =", mp.nstr(4 * mpf("1e-6") * 4 * sin(d * t / 2)**2 / d**2, 17))
