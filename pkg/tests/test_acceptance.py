"""Acceptance gate: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report. Tolerances are fixed here and absorb the spread between the bundled
constants and the reference table's unstated ones.
"""

import math

import numpy as np
import pytest

from qgrav import (QuantumRule, derive_orbit, fit_delta,
                   gr_precession_baseline, invert_delta, load_observations,
                   measured_precession, newtonian_force, orbit_params,
                   planet_precession, quantum_from_error, rad_to_arcsec,
                   corrected_force, weight_increment)

# Reference table: per-planet printed values and absolute tolerances.
TABLE_GOLDEN = {
    "Mercury": ({0.01: 10.8, 0.05: 54.1, 0.0398: 43.08}, 0.5),
    "Venus": ({0.01: 5.1, 0.05: 25.4, 0.0398: 20.18}, 0.3),
    "Earth": ({0.01: 3.1, 0.05: 15.4, 0.0398: 12.30}, 0.2),
}

GR_GOLDEN = {"Mercury": 43.03, "Venus": 8.63, "Earth": 3.84}


def _report(line):
    print(f"\n[acceptance] {line}")


def test_criterion_1_table_golden_reproduction(planets):
    for name, (columns, tol) in TABLE_GOLDEN.items():
        for delta, printed in columns.items():
            got = planet_precession(planets[name], delta, QuantumRule.PERIHELION)
            assert got.per_century_arcsec == pytest.approx(printed, abs=tol), \
                (name, delta, got.per_century_arcsec)
    _report("criterion 1 PASS: model columns match the printed table "
            "(Mercury ±0.5, Venus ±0.3, Earth ±0.2 arcsec)")


def test_criterion_2_gr_baseline(planets):
    for name, printed in GR_GOLDEN.items():
        got = gr_precession_baseline(planets[name])
        assert got.per_century_arcsec == pytest.approx(printed, abs=0.15), \
            (name, got.per_century_arcsec)
    _report("criterion 2 PASS: GR baseline matches the relativity column ±0.15 arcsec")


def test_criterion_3_rule_discrimination(planets):
    printed = 43.08
    semi = planet_precession(planets["Mercury"], 0.0398, QuantumRule.SEMIMINOR)
    peri = planet_precession(planets["Mercury"], 0.0398, QuantumRule.PERIHELION)
    assert semi.per_century_arcsec == pytest.approx(53.1, abs=0.2)
    assert abs(semi.per_century_arcsec - printed) / printed > 0.20
    assert abs(peri.per_century_arcsec - printed) / printed < 0.001
    _report(f"criterion 3 PASS: semi-minor rule gives {semi.per_century_arcsec:.2f} "
            f"(>20% off {printed}); perihelion rule within 0.1%")


def test_criterion_4_numeric_analytic_equivalence(planets):
    for name, el in planets.items():
        orbit = derive_orbit(el)
        quantum = quantum_from_error(0.0398, orbit, QuantumRule.PERIHELION)
        _, x = orbit_params(quantum, orbit)
        analytic = 2.0 * math.pi * (1.0 - x) / x
        numeric = measured_precession(el, 0.0398, QuantumRule.PERIHELION,
                                      n_orbits=50, tol=1e-12)
        assert numeric.per_orbit_rad == pytest.approx(analytic, rel=0.01), name
        closure = measured_precession(el, 0.0, QuantumRule.PERIHELION,
                                      n_orbits=3, tol=1e-12)
        assert abs(closure.per_orbit_rad) < 1e-9, name
    _report("criterion 4 PASS: 50-orbit integration within 1% of the analytic "
            "advance; Newtonian closure below 1e-9 rad/orbit")


def test_criterion_5_truncation_probe(planets):
    mercury = planets["Mercury"]
    orbit = derive_orbit(mercury)
    delta_eq = rad_to_arcsec(1e-3)  # quantum = 1e-3 * perihelion distance
    quantum = quantum_from_error(delta_eq, orbit, QuantumRule.PERIHELION)
    assert quantum == pytest.approx(1e-3 * orbit.r_p, rel=1e-12)
    _, x = orbit_params(quantum, orbit)
    analytic = 2.0 * math.pi * (1.0 - x) / x
    numeric = measured_precession(mercury, delta_eq, QuantumRule.PERIHELION,
                                  n_orbits=10, tol=1e-12)
    residual = (numeric.per_orbit_rad - analytic) / analytic
    assert abs(residual) < 0.005
    assert residual > 0.0  # the dropped second-order term is positive
    _report(f"criterion 5 PASS: first-order truncation residual {residual:+.2e} "
            "at quantum = 1e-3 r_p (within 0.5%, positive)")


def test_criterion_6_linearity_and_round_trip(planets):
    for el in planets.values():
        ratios = [planet_precession(el, float(d)).per_century_arcsec / float(d)
                  for d in np.linspace(1e-3, 0.05, 20)]
        assert (max(ratios) - min(ratios)) / ratios[0] < 1e-6
        orbit = derive_orbit(el)
        for delta in (1e-4, 1e-3, 0.01, 0.0398, 0.05):
            forward = planet_precession(el, delta).per_century_arcsec
            assert invert_delta(el, forward) == pytest.approx(delta, rel=1e-10)
            quantum = quantum_from_error(delta, orbit)
            _, x = orbit_params(quantum, orbit)
            eps = quantum * orbit.mu / orbit.h ** 2
            assert x * x + eps == pytest.approx(1.0, rel=1e-13)
    _report("criterion 6 PASS: linearity to 1e-6, inversion round trip to 1e-10, "
            "x^2 + eps = 1 to 1e-13")


def test_criterion_7_fit_behaviour(planets):
    observations = load_observations()
    result = fit_delta(observations, QuantumRule.PERIHELION, list(planets.values()))
    # closed-form WLS oracle, recomputed here from first principles
    slopes = {el.name: planet_precession(el, 0.01).per_century_arcsec / 0.01
              for el in planets.values()}
    num = sum(obs.value_arcsec * slopes[obs.planet] / obs.sigma_arcsec ** 2
              for obs in observations)
    den = sum((slopes[obs.planet] / obs.sigma_arcsec) ** 2 * 1.0
              for obs in observations)
    assert result.delta_star == pytest.approx(num / den, rel=1e-12)
    assert result.delta_star == pytest.approx(0.0395, abs=0.002)
    sigma = {obs.planet: obs.sigma_arcsec for obs in observations}
    assert abs(result.residuals["Mercury"]) < 0.5
    for name in ("Venus", "Earth"):
        assert result.residuals[name] < -sigma[name]
        assert abs(result.residuals[name]) > 0.5 * result.predicted[name]
    _report(f"criterion 7 PASS: delta* = {result.delta_star:.5f} ± "
            f"{result.delta_sigma:.5f}; Mercury fits within 0.5 arcsec, "
            "Venus/Earth are over-predicted beyond their errors")


def test_criterion_8_force_law_identities():
    worst = 0.0
    for n in range(2, 1_000_001):
        err = abs(weight_increment(n) * n * (n - 1) - 1.0)
        if err > worst:
            worst = err
    assert worst < 1e-13
    rng = np.random.default_rng(2024)
    for _ in range(500):
        g = float(10.0 ** rng.uniform(-11, 1))
        m1 = float(10.0 ** rng.uniform(0, 30))
        m2 = float(10.0 ** rng.uniform(0, 30))
        sep = float(10.0 ** rng.uniform(-2, 12))
        assert corrected_force(g, m1, m2, sep, 0.0) == newtonian_force(g, m1, m2, sep)
        quantum = sep * float(rng.uniform(1e-9, 0.9))
        f = corrected_force(g, m1, m2, sep, quantum)
        f0 = newtonian_force(g, m1, m2, sep)
        assert (f - f0) / f0 == pytest.approx(quantum / (sep - quantum), rel=1e-12)
    _report(f"criterion 8 PASS: weight identity exact to {worst:.1e} over [2, 1e6]; "
            "zero-quantum force equals Newton; relative excess = q/(L-q)")
