"""Closed catalog of scenarios, their configuration schema and runners.

A configuration is a JSON tree::

    {"scenario": "vector-ab", "seed": 0, "workers": 1,
     "params": {...}, "tolerances": {...},
     "output": {"dir": "reports", "format": "csv", "name": "vector-ab"}}

Everything except ``scenario`` is optional.  ``params`` and ``tolerances`` are
merged over the scenario defaults (nested objects merge, lists replace) and
unknown keys anywhere are rejected.  Each runner returns :class:`ReportRow`
objects whose reference column comes from a closed-form expression, never
from the simulation path.
"""
from __future__ import annotations

import copy
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import jsonschema
import numpy as np

from .cone import (ConeGeometry, geodesics_between, small_angle_phase_shift, string_phase_shift,
                   transport_holonomy, wedge_invariance_defect)
from .dynamics import (CosinePotential, GratingSpec, HamiltonianSpec, PropagatorOptions, band_weight,
                       commutator_defect, default_trials, evolution_operator, evolve, kinetic_energy_moment,
                       translation_operator)
from .errors import QGeoError, SchemaError
from .fields import CapacitorPulse, Curve, FluxString, GaugeFunction, UniformField, gauge_transform_state
from .geometry import (ClockSystem, clock_metric_ratio, clock_time, metric_order_ratios,
                       translation_metric_ratio)
from .grid import (Grid, PacketSpec, gaussian_packet, inner_product, moment_expectation, momentum_uncertainty,
                   superpose_packets, translate)
from .modular import (U1Representation, expect_f_ell, expect_f_tau, expect_g_gamma,
                      modular_momentum_expectation, quantize_charge)
from .report import ReportRow
from .wilson import (MatrixGauge, NonAbelianField, embed_abelian, gauge_transform_matrix, gauge_transform_spinor,
                     holonomy, richardson_ratio, su2_generators, unitarity_defect, wilson_lines)

PI = math.pi


def _wrap(a):
    return float((a + PI) % (2 * PI) - PI)


def _phase_value(measured: float, reference: float) -> float:
    """``measured`` moved by a multiple of 2 pi to the branch nearest ``reference``."""
    return reference + _wrap(measured - reference)


def _grid(p) -> Grid:
    return Grid(tuple(p["points"]), tuple(p["lengths"]))


class _Rows:
    def __init__(self, scenario, sweep, tol):
        self.scenario, self.sweep, self.tol, self.rows = scenario, sweep, tol, []

    def add(self, quantity, value, reference, tol_key=None, tolerance=None, mode="abs"):
        tolerance = self.tol[tol_key] if tolerance is None else tolerance
        self.rows.append(ReportRow(self.scenario, self.sweep, quantity, complex(value), complex(reference),
                                   float(tolerance), mode))

    def at_least(self, quantity, value, bound):
        self.add(quantity, value, bound, tolerance=0.0, mode="at_least")


# --------------------------------------------------------------------------
# two-packet


def _two_packet(params, tol, seed, dynamic, sweep):
    g = _grid(params["grid"])
    ell = params["separation"]
    a = gaussian_packet(g, PacketSpec((0.5 * ell,), params["width"], profile=params["profile"]))
    b = translate(a, -ell)
    single = [moment_expectation(a, 0, n) for n in range(1, params["max_moment"] + 1)]

    def point(alpha):
        r = _Rows("two-packet", alpha, tol)
        psi = superpose_packets(a, b, alpha)
        s = modular_momentum_expectation(psi, ell).value
        r.add("s", s, np.exp(1j * alpha) / 2, "s")
        r.add("arg_s", _phase_value(np.angle(s), alpha), alpha, "phase")
        r.add("s_translate_vs_spectral", inner_product(psi, translate(psi, ell)), s, "paths")
        for n, ref in enumerate(single, start=1):
            r.add(f"p^{n}", moment_expectation(psi, 0, n), ref, "moments")
        return r.rows

    return sweep(params["alphas"], point)


# --------------------------------------------------------------------------
# vector AB


def _ab_state(g, xs, p):
    pk = p["packet"]
    a = gaussian_packet(g, PacketSpec((xs, pk["height"]), pk["width"], profile=pk["profile"]))
    return superpose_packets(a, translate(a, (0.0, -2 * pk["height"])), pk["alpha"])


def _vector_ab_point(p, tol, flux, dynamic):
    q = p["charge"]
    st = p["string"]
    r = _Rows("vector-ab", flux, tol)
    ref = np.exp(1j * q * flux)
    strip = FluxString(tuple(st["center"]), flux, "strip", tuple(st["direction"]), st["half_width"])
    ell = (0.0, 2 * p["packet"]["height"])
    h = p["packet"]["height"]
    if dynamic:
        d = p["dynamic"]
        g = _grid(d["grid"])
        a = gaussian_packet(g, PacketSpec((d["start"], h), d["width"], (d["momentum"], 0.0)))
        psi = superpose_packets(a, translate(a, (0.0, -2 * h)), p["packet"]["alpha"])
        spec = HamiltonianSpec(d["mass"], q, strip)
        duration = (d["end"] - d["start"]) * d["mass"] / d["momentum"]
        later = evolve(psi, spec, PropagatorOptions.spanning(0.0, duration, d["steps"]))
        ratio = expect_f_ell(later, ell, strip, q).value / expect_f_ell(psi, ell, strip, q).value
        r.add("dynamic_ratio", ratio, ref, "ratio")
        r.add("dynamic_ratio_modulus", abs(ratio), 1.0, "ratio")
        return r.rows
    g = _grid(p["grid"])
    xb, xa = p["crossing"]["before"], p["crossing"]["after"]
    before, after = _ab_state(g, xb, p), _ab_state(g, xa, p)
    fb = expect_f_ell(before, ell, strip, q).value
    fa = expect_f_ell(after, ell, strip, q).value
    ratio = fa / fb
    r.add("ratio", ratio, ref, "ratio")
    r.add("ratio_modulus", abs(ratio), 1.0, "ratio")
    r.add("ratio_phase", _phase_value(np.angle(ratio), _wrap(q * flux)), _wrap(q * flux), "ratio")
    near = p["dogleg"]["near"]
    legs = []
    for xs, st_ in ((xb, before), (xa, after)):
        apex = xs + near * np.sign(xs)
        legs.append(expect_g_gamma(st_, Curve.spatial([[xs, -h], [apex, 0.0], [xs, h]]), strip, q).value)
    r.add("dogleg_ratio", legs[1] / legs[0], ref, "ratio")
    r.add("curve_independence", legs[1] / legs[0], ratio, "ratio")
    far = p["dogleg"]["far"]
    around = expect_g_gamma(before, Curve.spatial([[xb, -h], [xb + far, 0.0], [xb, h]]), strip, q).value
    r.add("encircling_curve_ratio", around / fb, ref, "ratio")
    azim = FluxString(tuple(st["center"]), flux)
    lam = strip.gauge_to_azimuthal()
    az = [expect_f_ell(gauge_transform_state(s, lam, q), ell, azim, q).value for s in (before, after)]
    r.add("azimuthal_gauge_ratio", az[1] / az[0], ratio, "gauge")
    x0 = p["positions"][0]
    f0 = expect_f_ell(_ab_state(g, x0, p), ell, strip, q).value
    for x in p["positions"][1:]:
        fx = expect_f_ell(_ab_state(g, x, p), ell, strip, q).value
        jump = _wrap(q * flux) if (x > st["center"][0]) != (x0 > st["center"][0]) else 0.0
        r.add(f"phase_shift@x={x:g}", _phase_value(np.angle(fx / f0), jump), jump, "ratio")
    return r.rows


def _vector_ab(params, tol, seed, dynamic, sweep):
    return sweep(params["fluxes"], lambda flux: _vector_ab_point(params, tol, flux, dynamic))


# --------------------------------------------------------------------------
# scalar AB


def _scalar_ab_point(p, tol, e0, psi):
    r = _Rows("scalar-ab", e0, tol)
    q, cap = p["charge"], p["capacitor"]
    lo, hi = cap["interval"]
    beta_ref = q * e0 * (hi - lo) * (cap["t_off"] - cap["t_on"])
    t0, t1, dt = p["t_start"], p["t_after"], p["dt"]
    lag_steps = int(round(p["lag"] / dt))
    ratios = {}
    for gauge in ("scalar", "strip"):
        field = CapacitorPulse((lo, hi), e0, cap["t_on"], cap["t_off"], cap["smoothing"], gauge)
        spec = HamiltonianSpec(p["mass"], q, field)
        before = expect_f_tau(psi, p["lag"], spec, PropagatorOptions(dt, lag_steps, t0)).value
        later = evolve(psi, spec, PropagatorOptions.spanning(t0, t1, int(round((t1 - t0) / dt))))
        after = expect_f_tau(later, p["lag"], spec, PropagatorOptions(dt, lag_steps, t1)).value
        ratios[gauge] = after / before
        beta = _phase_value(np.angle(after / before), beta_ref)
        r.add(f"beta_{gauge}", beta, beta_ref, tolerance=tol["beta_relative"] * abs(beta_ref))
        r.add(f"ratio_modulus_{gauge}", abs(after / before), 1.0, "gauge")
        for n in range(1, p["moments"] + 1):
            k0 = kinetic_energy_moment(psi, spec, t0, n)
            k1 = kinetic_energy_moment(later, spec, t1, n)
            r.add(f"kinetic_moment_{n}_change_{gauge}", (k1 - k0) / k0, 0.0, "kinetic")
    r.add("gauge_agreement", ratios["strip"], ratios["scalar"], "gauge")
    return r.rows


def _scalar_ab(params, tol, seed, dynamic, sweep):
    g = _grid(params["grid"])
    a = gaussian_packet(g, PacketSpec((params["start"],), params["width"], (params["momentum"],)))
    free = HamiltonianSpec(params["mass"], params["charge"])
    t0 = params["t_start"]
    b = evolve(a, free, PropagatorOptions.spanning(t0, t0 + params["lag"], int(round(params["lag"] / params["dt"]))))
    psi = superpose_packets(a, b, params["alpha"])
    return sweep(params["field_strengths"], lambda e0: _scalar_ab_point(params, tol, e0, psi))


# --------------------------------------------------------------------------
# grating


def _p_moment_change(before, after):
    return max(abs(moment_expectation(after, 0, n) - moment_expectation(before, 0, n)) for n in (1, 2))


def _grating_thin(p, tol, seed):
    r = _Rows("grating", "thin", tol)
    g = _grid(p["grid"])
    ell = p["period"]
    spec = GratingSpec(ell, p["strength"])
    spec.check(g)
    y = g.mesh()[0]
    mask = spec.transmission(y)[np.newaxis]
    psi = gaussian_packet(g, PacketSpec((p["center"],), p["width"], (p["momentum"],)))
    out = psi.replace(psi.amplitudes * mask)
    r.add("modular_momentum", modular_momentum_expectation(out, ell).value,
          modular_momentum_expectation(psi, ell).value, "conservation")
    trials = default_trials(g, p["trials"], seed)
    grating = lambda s: s.replace(s.amplitudes * mask)  # noqa: E731
    r.add("commutator_period", commutator_defect(grating, translation_operator(ell), trials), 0.0, "commutator")
    r.at_least("commutator_half_period", commutator_defect(grating, translation_operator(0.5 * ell), trials),
               tol["half_period_min"])
    half = p["band_sigmas"] / (2 * p["width"])
    r.at_least("band_weight", band_weight(out, ell, half), tol["band_weight_min"])
    r.at_least("p_not_conserved", _p_moment_change(psi, out), tol["p_change_min"])
    return r.rows


def _grating_thick(p, tol, seed):
    r = _Rows("grating", "thick", tol)
    g = _grid(p["grid"])
    ell = p["period"]
    th = p["thick"]
    spec = HamiltonianSpec(th["mass"], 1.0, potential=CosinePotential(th["amplitude"], ell))
    opts = PropagatorOptions.spanning(0.0, th["duration"], th["steps"])
    psi = gaussian_packet(g, PacketSpec((p["center"],), p["width"], (p["momentum"],)))
    out = evolve(psi, spec, opts)
    r.add("modular_momentum", modular_momentum_expectation(out, ell).value,
          modular_momentum_expectation(psi, ell).value, "conservation")
    trials = default_trials(g, p["trials"], seed)
    U = evolution_operator(spec, opts)
    r.add("commutator_period", commutator_defect(U, translation_operator(ell), trials), 0.0, "commutator")
    r.at_least("commutator_half_period", commutator_defect(U, translation_operator(0.5 * ell), trials),
               tol["half_period_min"])
    r.at_least("p_not_conserved", _p_moment_change(psi, out), tol["p_change_min"])
    return r.rows


def _grating(params, tol, seed, dynamic, sweep):
    runners = {"thin": _grating_thin, "thick": _grating_thick}
    return sweep(params["kinds"], lambda kind: runners[kind](params, tol, seed))


# --------------------------------------------------------------------------
# metric


def _metric(params, tol, seed, dynamic, sweep):
    p = params
    g = _grid(p["grid"])
    rel = tol["ratio_relative"]

    def point(kind):
        r = _Rows("metric", kind, tol)
        if kind == "translation":
            for name, mom in (("gaussian", 0.0), ("boosted_gaussian", p["boost"])):
                psi = gaussian_packet(g, PacketSpec((0.0,), p["width"], (mom,)))
                r.add(f"{name}_ratio", translation_metric_ratio(psi, 1.0, p["dl"]), 1 / p["width"],
                      tolerance=rel / p["width"])
            th = p["two_hump"]
            a = gaussian_packet(g, PacketSpec((-0.5 * th["separation"],), p["width"], profile=th["profile"]))
            two = superpose_packets(a, translate(a, th["separation"]), th["alpha"])
            ref = 2 * momentum_uncertainty(two)
            r.add("two_hump_ratio", translation_metric_ratio(two, 1.0, p["dl"]), ref, tolerance=rel * ref)
            psi = gaussian_packet(g, PacketSpec((0.0,), p["width"]))
            for i, ratio in enumerate(metric_order_ratios(psi, 1.0, tuple(p["order_dls"]))):
                r.at_least(f"order_ratio_{i}", ratio, tol["order_min"])
            return r.rows
        ck = p["clock"]
        two_level = ClockSystem((1.0, -1.0), (2 ** -0.5, 2 ** -0.5))
        r.add("two_level_clock_ratio", clock_metric_ratio(two_level, ck["dt"]), 2.0, tolerance=2 * rel)
        rc = ClockSystem.random(ck["levels"], seed, ck["energy_scale"])
        e = np.asarray(rc.energies)
        w = np.abs(rc.state) ** 2
        ref = 2 * np.sqrt(np.sum(w * (e - np.sum(w * e)) ** 2))
        r.add("random_clock_ratio", clock_metric_ratio(rc, ck["dt"]), ref, tolerance=rel * ref)
        for levels in ck["universality_levels"]:
            c = ClockSystem.random(levels, seed + levels, ck["energy_scale"])
            r.add(f"clock_time_{levels}_levels", clock_time(c, ck["universality_dt"]), ck["universality_dt"],
                  tolerance=tol["clock_time_relative"] * ck["universality_dt"])
        return r.rows

    return sweep(["translation", "clock"], point)


# --------------------------------------------------------------------------
# cone


def _cone_point(p, tol, theta):
    r = _Rows("cone", theta, tol)
    cone = ConeGeometry(theta, p["G"], orientation=p["orientation"])
    off, ell = p["angle_offset"], p["length"]
    f1, f2, p0 = p["focus"]["l1"], p["focus"]["l2"], p["momentum"]
    sym = geodesics_between(cone, cone.to_chart(0.5 * ell, off), cone.to_chart(0.5 * ell, off + PI))
    if theta == 0:
        r.add("geodesic_count", len(sym), 1, "exact")
        r.add("length", sym.lengths[0], ell, "length")
        r.add("dphi", string_phase_shift(cone, p0, f1, f2), 0.0, "exact")
        return r.rows
    r.add("geodesic_count", len(sym), 2, "exact")
    r.add("symmetric_short", sym.lengths[0], ell * math.cos(0.5 * theta), "length")
    r.add("symmetric_long", sym.lengths[1], ell, "length")
    r1, r2 = p["l1"], p["l2"]
    A, B = cone.to_chart(r1, off), cone.to_chart(r2, off + PI)
    gen = geodesics_between(cone, A, B).lengths
    r.add("general_second", gen[0], math.sqrt(r1 * r1 + r2 * r2 + 2 * r1 * r2 * math.cos(theta)), "length")
    r.add("general_through_apex", gen[1], r1 + r2, "length")
    omegas = np.linspace(0, 2 * PI, p["orientations"], endpoint=False)
    r.add("wedge_defect", wedge_invariance_defect(cone, A, B, omegas), 0.0, "length")
    loop = [cone.to_chart(1.0, phi) for phi in np.linspace(0, cone.total_angle, 64, endpoint=False)]
    r.add("holonomy_angle", transport_holonomy(cone, loop)[1], _wrap(theta), "length")
    dphi = string_phase_shift(cone, p0, f1, f2)
    r.add("dphi", dphi, p0 * (f2 - f1) * math.tan(0.5 * theta), "dphi")
    if theta <= p["small_angle_max"]:
        def rel_err(t):
            c = ConeGeometry(t, p["G"])
            approx = small_angle_phase_shift(c, p0, f1, f2)
            return abs(string_phase_shift(c, p0, f1, f2) - approx) / abs(approx)
        r.add("small_angle_relative_error", rel_err(theta), 0.0, "small_angle")
        r.add("small_angle_order", math.log2(rel_err(theta) / rel_err(0.5 * theta)), 2.0, "order")
    return r.rows


def _cone(params, tol, seed, dynamic, sweep):
    return sweep(params["deficits"], lambda theta: _cone_point(params, tol, theta))


# --------------------------------------------------------------------------
# non-Abelian


def _random_gauge(p, seed):
    gg = p["gauge"]
    L = tuple(p["grid"]["lengths"])
    fns = tuple(GaugeFunction.random(L, gg["terms"], seed * 1009 + j, gg["max_mode"], gg["amplitude"])
                for j in range(3))
    return MatrixGauge(su2_generators(), p["coupling"], fns)


def _non_abelian_point(p, tol, seed, kind):
    r = _Rows("non-abelian", kind, tol)
    gens = su2_generators()
    field = NonAbelianField(gens, p["coupling"], tuple(UniformField(tuple(v)) for v in p["components"]))
    curve = Curve.spatial(p["curve"])
    steps, scheme = p["wilson_steps"], p["scheme"]
    rng = np.random.default_rng(seed)
    if kind == "wilson":
        dressed = gauge_transform_matrix(field, _random_gauge(p, seed))
        offsets = rng.uniform(-0.25, 0.25, (p["offsets"], 2)) * np.asarray(p["grid"]["lengths"])
        W = wilson_lines(dressed, curve, offsets, steps, scheme=scheme)
        r.add("unitarity_defect", unitarity_defect(W), 0.0, "unitarity")
        back = wilson_lines(dressed, curve.reversed(), offsets, steps, scheme=scheme)
        r.add("reversal_defect", float(np.max(np.abs(back - np.conj(np.swapaxes(W, -1, -2))))), 0.0, "unitarity")
        emb = p["embedding"]
        fs = FluxString(tuple(emb["center"]), emb["flux"])
        e = embed_abelian(fs, emb["charge"])
        loop = Curve.spatial(emb["loop"])
        r.add("embedding_loop", wilson_lines(e, loop, None, emb["steps"], scheme=scheme)[0, 0, 0],
              np.exp(1j * emb["charge"] * emb["flux"]), "embedding")
        opened = Curve.spatial(emb["loop"][:-1])
        r.add("embedding_open", wilson_lines(e, opened, None, emb["steps"], scheme=scheme)[0, 0, 0],
              np.exp(1j * fs.line_phase(opened, emb["charge"])), "embedding")
        r.at_least("richardson_midpoint", richardson_ratio(dressed, curve, p["richardson_steps"], "midpoint"),
                   tol["richardson_min"])
        return r.rows
    # gauge invariance of <g_gamma> and covariance of the holonomy
    gauge = _random_gauge(p, seed + 1)
    dressed = gauge_transform_matrix(field, gauge)
    g = _grid(p["grid"])
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    pk = p["packet"]
    psi = gaussian_packet(g, PacketSpec(tuple(pk["center"]), pk["width"], tuple(pk["momentum"]),
                                        internal=tuple(c / np.linalg.norm(c))))
    base = expect_g_gamma(psi, curve, field, wilson_steps=steps, scheme=scheme).value
    moved = expect_g_gamma(gauge_transform_spinor(psi, gauge), curve, dressed, wilson_steps=steps,
                           scheme=scheme).value
    r.add("g_gamma_gauge_invariance", moved, base, "invariance")
    loop = Curve.spatial(p["curve"] + [p["curve"][0]])
    H = holonomy(field, loop, steps, scheme=scheme)
    H2 = holonomy(dressed, loop, steps, scheme=scheme)
    u = gauge.unitary(np.asarray(p["curve"][0], dtype=float))
    r.add("holonomy_covariance", float(np.max(np.abs(H2 - u @ H @ np.conj(u.T)))), 0.0, "invariance")
    return r.rows


def _non_abelian(params, tol, seed, dynamic, sweep):
    return sweep(["wilson", "gauge"], lambda kind: _non_abelian_point(params, tol, seed, kind))


# --------------------------------------------------------------------------
# charge quantization


def _quantization(params, tol, seed, dynamic, sweep):
    rep0 = U1Representation(params["circumference"], 0.0)
    head = _Rows("quantization", "e0", tol)
    head.add("e0", quantize_charge(rep0).e0, params["expected_e0"], "e0")

    def point(case):
        r = _Rows("quantization", case["charge"], tol)
        res = quantize_charge(U1Representation(params["circumference"], case["charge"]), tol["quantization"])
        r.add("valid", float(res.valid), float(case["valid"]), "exact")
        if case["valid"]:
            r.add("n", res.n, case["n"], "exact")
        return r.rows

    return head.rows + sweep(params["cases"], point)


# --------------------------------------------------------------------------
# catalog


def _quantization_cases():
    valid = [(-1.0, -3), (1.0, 3), (1 / 3, 1), (2 / 3, 2), (0.0, 0), (-1 / 3, -1), (-2 / 3, -2), (4 / 3, 4),
             (2.0, 6), (-2.0, -6)]
    invalid = [0.5, 0.25, 1e-3, 0.3333, -0.7, 1.1, PI, math.sqrt(2), 1 / 6, 1 / 3 + 1e-6]
    return ([{"charge": q, "valid": True, "n": n} for q, n in valid]
            + [{"charge": q, "valid": False, "n": 0} for q in invalid])


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    runner: Callable
    defaults: dict
    tolerances: dict
    constraints: dict


_POS = {"exclusiveMinimum": 0}
_GRID = {"grid.points": {"minItems": 1, "maxItems": 2, "items": {"type": "integer", "minimum": 16}},
         "grid.lengths": {"minItems": 1, "maxItems": 2, "items": {"type": "number", "exclusiveMinimum": 0}}}

CATALOG = {s.name: s for s in [
    Scenario(
        "two-packet", "modular momentum of two separated packets with relative phase alpha", _two_packet,
        {"grid": {"points": [4096], "lengths": [64.0]}, "width": 1.0, "separation": 8.0, "profile": "bump",
         "alphas": [0.0, PI / 3, PI], "max_moment": 4},
        {"s": 1e-5, "phase": 1e-6, "moments": 1e-8, "paths": 1e-12},
        {**_GRID, "width": _POS, "separation": _POS, "profile": {"enum": ["gaussian", "bump"]},
         "max_moment": {"minimum": 1, "maximum": 8}, "alphas": {"minItems": 1}}),
    Scenario(
        "vector-ab", "modular kinetic momentum of a packet pair crossing the strip of a flux string", _vector_ab,
        {"grid": {"points": [320, 320], "lengths": [40.0, 40.0]}, "charge": 1.0, "fluxes": [PI / 2, PI, 2 * PI],
         "string": {"center": [0.0, 0.0], "direction": [-1.0, 0.0], "half_width": 0.5},
         "packet": {"width": 0.5, "profile": "bump", "height": 4.0, "alpha": 0.4},
         "crossing": {"before": -4.0, "after": 4.0}, "dogleg": {"near": 3.0, "far": 12.0},
         "positions": [-6.0, -2.5, 2.5, 6.0],
         "dynamic": {"grid": {"points": [512, 512], "lengths": [32.0, 32.0]}, "mass": 20.0, "momentum": 40.0,
                     "width": 0.5, "start": -7.0, "end": 7.0, "steps": 70}},
        {"ratio": 1e-6, "gauge": 1e-6},
        {**_GRID, "dynamic.grid.points": _GRID["grid.points"], "dynamic.grid.lengths": _GRID["grid.lengths"],
         "string.center": {"minItems": 2, "maxItems": 2}, "string.direction": {"minItems": 2, "maxItems": 2},
         "string.half_width": _POS, "packet.width": _POS, "packet.profile": {"enum": ["gaussian", "bump"]},
         "dynamic.mass": _POS, "dynamic.momentum": _POS, "dynamic.width": _POS, "dynamic.steps": {"minimum": 1},
         "fluxes": {"minItems": 1}, "positions": {"minItems": 2}}),
    Scenario(
        "scalar-ab", "modular kinetic energy of a packet pair around a capacitor pulse, two gauges", _scalar_ab,
        {"grid": {"points": [4096], "lengths": [128.0]}, "mass": 20.0, "charge": 1.0, "momentum": 40.0,
         "width": 1.0, "start": -50.0, "alpha": 0.0, "t_start": -5.0, "lag": 15.0, "t_after": 14.25, "dt": 0.05,
         "capacitor": {"interval": [-1.0, 1.0], "t_on": 11.0, "t_off": 14.0, "smoothing": 0.25},
         "field_strengths": [0.25, 0.5, 1.0], "moments": 4},
        {"beta_relative": 1e-4, "gauge": 1e-6, "kinetic": 1e-6},
        {**_GRID, "mass": _POS, "width": _POS, "lag": _POS, "dt": _POS, "capacitor.smoothing": _POS,
         "capacitor.interval": {"minItems": 2, "maxItems": 2}, "moments": {"minimum": 1, "maximum": 4},
         "field_strengths": {"minItems": 1}}),
    Scenario(
        "grating", "modular momentum conservation through thin and thick periodic gratings", _grating,
        {"grid": {"points": [4096], "lengths": [128.0]}, "period": 4.0, "strength": 1.5, "width": 6.0,
         "center": 0.0, "momentum": 0.0, "band_sigmas": 3.0, "trials": 16, "kinds": ["thin", "thick"],
         "thick": {"amplitude": 2.0, "mass": 1.0, "duration": 2.0, "steps": 200}},
        {"conservation": 1e-10, "commutator": 1e-10, "half_period_min": 1e-2, "band_weight_min": 0.99,
         "p_change_min": 1e-3},
        {**_GRID, "period": _POS, "width": _POS, "band_sigmas": _POS, "trials": {"minimum": 1},
         "kinds": {"minItems": 1, "items": {"enum": ["thin", "thick"]}}, "thick.mass": _POS,
         "thick.duration": _POS, "thick.steps": {"minimum": 1}}),
    Scenario(
        "metric", "Fubini-Study metric along translations and clock evolution", _metric,
        {"grid": {"points": [2048], "lengths": [64.0]}, "width": 1.0, "boost": 2.0, "dl": 1e-3,
         "order_dls": [0.1, 0.05, 0.025, 0.0125],
         "two_hump": {"separation": 10.0, "alpha": 0.7, "profile": "bump"},
         "clock": {"levels": 3, "energy_scale": 1.0, "dt": 1e-3, "universality_levels": [3, 5],
                   "universality_dt": 1e-4}},
        {"ratio_relative": 1e-4, "order_min": 3.9, "clock_time_relative": 1e-6},
        {**_GRID, "width": _POS, "dl": _POS, "order_dls": {"minItems": 2, "items": {"type": "number",
                                                                                     "exclusiveMinimum": 0}},
         "two_hump.separation": _POS, "two_hump.profile": {"enum": ["gaussian", "bump"]},
         "clock.levels": {"minimum": 2}, "clock.dt": _POS, "clock.universality_dt": _POS,
         "clock.universality_levels": {"items": {"type": "integer", "minimum": 2}}}),
    Scenario(
        "cone", "geodesics, wedge invariance and interference phase around a conical defect", _cone,
        {"deficits": [0.0, 0.005, 0.01, 0.1, 0.5, 1.0], "G": 1.0, "orientation": 0.0, "angle_offset": 0.2,
         "length": 2.0, "l1": 1.0, "l2": 2.5, "orientations": 8, "momentum": 10.0,
         "focus": {"l1": 1.0, "l2": 2.0}, "small_angle_max": 0.01},
        {"exact": 0.0, "length": 1e-12, "dphi": 1e-12, "small_angle": 1e-4, "order": 1e-2},
        {"deficits": {"minItems": 1, "items": {"type": "number", "minimum": 0, "exclusiveMaximum": PI}},
         "G": _POS, "length": _POS, "l1": _POS, "l2": _POS, "orientations": {"minimum": 1},
         "focus.l1": _POS, "focus.l2": _POS}),
    Scenario(
        "non-abelian", "su(2) Wilson lines, holonomy covariance and g_gamma gauge invariance", _non_abelian,
        {"grid": {"points": [80, 80], "lengths": [20.0, 20.0]}, "coupling": 0.7,
         "components": [[0.4, -0.2], [0.1, 0.5], [-0.3, 0.2]],
         "curve": [[0.0, 0.0], [2.0, 0.5], [2.5, 2.5], [0.0, 3.0]],
         "packet": {"center": [0.0, 0.0], "width": 1.0, "momentum": [0.3, 0.0]},
         "gauge": {"terms": 3, "max_mode": 2, "amplitude": 0.8},
         "wilson_steps": 32, "scheme": "magnus4", "offsets": 16, "richardson_steps": 64,
         "embedding": {"flux": 1.7, "center": [0.3, 0.1], "charge": 1.3, "steps": 256,
                       "loop": [[2.0, 0.0], [0.0, 2.0], [-2.0, 0.5], [0.0, -2.0], [2.0, 0.0]]}},
        {"unitarity": 1e-10, "embedding": 1e-10, "invariance": 1e-8, "richardson_min": 3.0},
        {**_GRID, "grid.points": {"minItems": 2, "maxItems": 2, "items": {"type": "integer", "minimum": 16}},
         "grid.lengths": {"minItems": 2, "maxItems": 2, "items": {"type": "number", "exclusiveMinimum": 0}},
         "components": {"minItems": 3, "maxItems": 3, "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                                               "items": {"type": "number"}}},
         "curve": {"minItems": 2, "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                            "items": {"type": "number"}}},
         "embedding.loop": {"minItems": 4, "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                                     "items": {"type": "number"}}},
         "scheme": {"enum": ["midpoint", "magnus4"]}, "wilson_steps": {"minimum": 1},
         "embedding.steps": {"minimum": 1}, "richardson_steps": {"minimum": 1}, "offsets": {"minimum": 1},
         "packet.width": _POS, "gauge.terms": {"minimum": 1}, "gauge.max_mode": {"minimum": 1}}),
    Scenario(
        "quantization", "charge quantization from the circumference of U(1)", _quantization,
        {"circumference": 6 * PI, "expected_e0": 1 / 3, "cases": _quantization_cases()},
        {"e0": 0.0, "exact": 0.0, "quantization": 1e-9},
        {"circumference": _POS, "cases": {"minItems": 1}}),
]}


# --------------------------------------------------------------------------
# schema


def _infer(value, path, constraints):
    extra = constraints.get(path, {})
    if isinstance(value, bool):
        schema = {"type": "boolean"}
    elif isinstance(value, int):
        schema = {"type": "integer"}
    elif isinstance(value, float):
        schema = {"type": "number"}
    elif isinstance(value, str):
        schema = {"type": "string"}
    elif isinstance(value, dict):
        schema = {"type": "object", "additionalProperties": False,
                  "properties": {k: _infer(v, f"{path}.{k}" if path else k, constraints) for k, v in value.items()}}
    elif isinstance(value, list):
        schema = {"type": "array"}
        if value:
            item = _infer(value[0], path + "[]", constraints)
            if item["type"] == "object":
                item["required"] = sorted(value[0])
            if item["type"] == "integer" and any(isinstance(v, float) for v in value):
                item["type"] = "number"
            schema["items"] = item
    else:
        raise TypeError(f"cannot infer a schema for {value!r}")
    if extra.get("items") and schema.get("items"):
        extra = {**extra, "items": {**schema["items"], **extra["items"]}}
    return {**schema, **extra}


_OUTPUT_SCHEMA = {"type": "object", "additionalProperties": False,
                  "properties": {"dir": {"type": "string"}, "format": {"enum": ["csv", "json"]},
                                 "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"}}}


def config_schema(name: str | None = None) -> dict:
    """JSON schema of a configuration (for ``name``, or the scenario-agnostic envelope)."""
    schema = {"$schema": "https://json-schema.org/draft/2020-12/schema", "type": "object",
              "additionalProperties": False, "required": ["scenario"],
              "properties": {"scenario": {"enum": sorted(CATALOG)}, "seed": {"type": "integer", "minimum": 0},
                             "workers": {"type": "integer", "minimum": 1}, "params": {"type": "object"},
                             "tolerances": {"type": "object"}, "output": _OUTPUT_SCHEMA}}
    if name is not None:
        sc = CATALOG[name]
        schema["properties"]["params"] = _infer(sc.defaults, "", sc.constraints)
        schema["properties"]["tolerances"] = {
            "type": "object", "additionalProperties": False,
            "properties": {k: {"type": "number", "minimum": 0} for k in sc.tolerances}}
    return schema


def _check(instance, schema):
    validator = jsonschema.Draft202012Validator(schema)
    error = jsonschema.exceptions.best_match(validator.iter_errors(instance))
    if error is not None:
        raise SchemaError(error.message, error.absolute_path)


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        out[k] = _merge(out[k], v) if isinstance(v, dict) and isinstance(out.get(k), dict) else copy.deepcopy(v)
    return out


def validate_config(config) -> dict:
    """Schema-check ``config`` and return it resolved against the scenario defaults.

    Raises:
        SchemaError: with the path of the offending field.
    """
    _check(config, config_schema())
    name = config["scenario"]
    _check(config, config_schema(name))
    sc = CATALOG[name]
    output = {"dir": ".", "format": "csv", "name": name, **config.get("output", {})}
    return {"scenario": name, "seed": config.get("seed", 0), "workers": config.get("workers", 1),
            "params": _merge(sc.defaults, config.get("params", {})),
            "tolerances": {**sc.tolerances, **config.get("tolerances", {})}, "output": output}


def default_config(name: str) -> dict:
    if name not in CATALOG:
        raise SchemaError(f"unknown scenario {name!r}", ("scenario",))
    sc = CATALOG[name]
    return {"scenario": name, "seed": 0, "params": copy.deepcopy(sc.defaults), "tolerances": dict(sc.tolerances)}


def _sweeper(name, workers, errors):
    def run(items, fn):
        def guarded(item):
            try:
                return fn(item)
            except QGeoError as exc:
                errors.append(f"{name} sweep {item!r}: {type(exc).__name__}: {exc}")
                return [ReportRow(name, item, f"error:{type(exc).__name__}", complex(math.nan), 0.0, 0.0)]
        if workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(guarded, items))
        else:
            chunks = [guarded(it) for it in items]
        return [row for chunk in chunks for row in chunk]
    return run


def run_scenario(config, dynamic: bool = False, errors: list | None = None) -> list:
    """Validate ``config``, run it and return report rows in sweep order.

    A numeric failure inside one sweep point becomes a failing ``error:<kind>``
    row and the remaining points still run; messages go to ``errors``.
    """
    cfg = validate_config(config)
    errors = [] if errors is None else errors
    sc = CATALOG[cfg["scenario"]]
    sweep = _sweeper(sc.name, cfg["workers"], errors)
    return sc.runner(cfg["params"], cfg["tolerances"], cfg["seed"], dynamic, sweep)
