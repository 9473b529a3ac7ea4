import math

import pytest

from piecewise_melnikov.melnikov import (
    PerturbationSpec,
    canonical_form,
    melnikov_canonical,
    u_form,
)
from piecewise_melnikov.simulator import (
    IntegrationError,
    SimConfig,
    cross_validate,
    find_limit_cycles,
    return_map,
)
from piecewise_melnikov.zeros import realize_max_zeros

ZERO_SPEC = PerturbationSpec(1, "four-zone", {})


class TestReturnMap:
    def test_unperturbed_closure(self):
        cfg = SimConfig(eps=0.0)
        for h in (0.5, 2.0, 10.0):
            sample = return_map(ZERO_SPEC, cfg, h)
            assert abs(sample.displacement) <= 1e-9 * h
            assert sample.time == pytest.approx(2 * math.pi, rel=1e-8)

    def test_zero_spec_with_nonzero_eps(self):
        sample = return_map(ZERO_SPEC, SimConfig(eps=1e-3), 2.0)
        assert abs(sample.displacement) <= 1e-9 * 2.0

    def test_four_zone_crossing_sequence(self):
        sample = return_map(ZERO_SPEC, SimConfig(eps=0.0), 2.0)
        curves = [c for c, _ in sample.crossings]
        assert curves == ["y=-x^2", "y=-x^2", "y=x^2", "y=x^2"]
        xs = [p[0] for _, p in sample.crossings]
        assert xs[0] > 0 > xs[1] and xs[2] < 0 < xs[3]

    def test_crossings_land_on_curves(self):
        sample = return_map(ZERO_SPEC, SimConfig(eps=0.0), 2.0)
        for curve, (x, y) in sample.crossings:
            target = x * x if curve == "y=x^2" else -x * x
            assert abs(y - target) < 1e-12

    def test_two_zone_sequences(self):
        up = PerturbationSpec(1, "two-zone-upper", {(1, "b", 0, 1): 1})
        sample = return_map(up, SimConfig(eps=1e-3), 2.0)
        assert [c for c, _ in sample.crossings] == ["y=x^2", "y=x^2"]
        assert sample.crossings[0][1][0] < 0 < sample.crossings[1][1][0]
        lo = PerturbationSpec(1, "two-zone-lower", {(1, "b", 0, 1): 1})
        sample = return_map(lo, SimConfig(eps=1e-3), 2.0)
        assert [c for c, _ in sample.crossings] == ["y=-x^2", "y=-x^2"]
        assert sample.crossings[0][1][0] > 0 > sample.crossings[1][1][0]

    def test_displacement_tracks_melnikov_sign_and_scale(self):
        spec = PerturbationSpec(1, "four-zone", {(1, "b", 0, 1): 1})
        uf = u_form(canonical_form(spec))
        m2 = 2.0 * melnikov_canonical(uf, 2.0)
        ratios = []
        for eps in (1e-2, 1e-3, 1e-4):
            d = return_map(spec, SimConfig(eps=eps), 2.0).displacement
            assert d > 0  # sign(d) = sign(eps * M)
            ratios.append(d / eps)
        # first-order scaling: d/eps approximately constant, near 2*M(h)
        spread = (max(ratios) - min(ratios)) / abs(ratios[-1])
        assert spread < 0.10
        assert ratios[-1] == pytest.approx(m2, rel=1e-3)

    def test_sign_between_realized_zeros(self):
        res = realize_max_zeros([0.1, 0.2, 0.3, 0.4], "four-zone")
        uf = u_form(canonical_form(res.spec))
        hs = res.report.locations_h()
        cfg = SimConfig(eps=1e-3)
        for ha, hb in zip(hs, hs[1:]):
            h_mid = 0.5 * (ha + hb)
            d = return_map(res.spec, cfg, h_mid).displacement
            m = melnikov_canonical(uf, h_mid)
            assert d * (cfg.eps * m) > 0

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ValueError):
            return_map(ZERO_SPEC, SimConfig(), -1.0)

    def test_max_steps_failure_carries_trace(self):
        cfg = SimConfig(eps=0.0, max_steps=3)
        with pytest.raises(IntegrationError):
            return_map(ZERO_SPEC, cfg, 2.0)


class TestFindLimitCycles:
    def test_zero_spec_empty(self):
        assert find_limit_cycles(ZERO_SPEC, SimConfig(eps=1e-3), 0.5, 2.0, samples=8) == []

    def test_realized_two_zone_cycles(self):
        res = realize_max_zeros([0.1, 0.2, 0.3], "two-zone-upper")
        hs = res.report.locations_h()
        cycles = find_limit_cycles(
            res.spec, SimConfig(eps=1e-3), 0.6 * hs[0], 1.6 * hs[-1], samples=48
        )
        assert len(cycles) == 3
        for (h_star, _), h_m in zip(cycles, hs):
            assert abs(h_star - h_m) <= 0.05 * h_m

    def test_stability_flags_alternate(self):
        res = realize_max_zeros([0.1, 0.2, 0.3], "two-zone-upper")
        hs = res.report.locations_h()
        cycles = find_limit_cycles(
            res.spec, SimConfig(eps=1e-3), 0.6 * hs[0], 1.6 * hs[-1], samples=48
        )
        flags = [s for _, s in cycles]
        assert len(set(flags)) == 2  # simple zeros alternate
        assert all(a != b for a, b in zip(flags, flags[1:]))


class TestCrossValidate:
    def test_zero_spec(self):
        report = cross_validate(ZERO_SPEC, [1e-2, 1e-3])
        assert [e["count"] for e in report["eps_results"]] == [0, 0]
        assert report["validation_ok"]

    def test_single_b_spec_counts_match_scan(self):
        spec = PerturbationSpec(1, "four-zone", {(1, "b", 0, 1): 1})
        report = cross_validate(spec, [1e-2, 1e-3])
        assert report["m_zero_count"] == 0
        assert [e["count"] for e in report["eps_results"]] == [0, 0]
