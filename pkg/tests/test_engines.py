"""Integration engines: exactness, splitting, Monte Carlo reproducibility."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontomodels.engines import (
    ClosedForm,
    EngineError,
    MC_BLOCK,
    MonteCarlo,
    SphereQuadrature,
    parse_engine,
    sample_sphere,
)

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def monomial_integral(a: int, b: int, c: int) -> float:
    # Solid-angle integral of x^a y^b z^c over the unit sphere.
    if a % 2 or b % 2 or c % 2:
        return 0.0
    num = double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1)
    return 4.0 * math.pi * num / double_factorial(a + b + c + 1)


def rand_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


class TestSphereQuadrature:
    def test_weights_sum_to_sphere_area(self):
        q = SphereQuadrature(9)
        _, w = q.nodes()
        assert w.sum() == pytest.approx(4.0 * math.pi, abs=1e-12)
        _, w = q.nodes(split_axes=(Z, X))
        assert w.sum() == pytest.approx(4.0 * math.pi, abs=1e-10)

    @given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
    @settings(max_examples=60, deadline=None)
    def test_spherical_polynomials_exact(self, a, b, c):
        if a + b + c > 17:
            a, b, c = a % 4, b % 4, c % 4
        q = SphereQuadrature(17)
        val = q.integrate(lambda p: p[:, 0] ** a * p[:, 1] ** b * p[:, 2] ** c)
        assert val == pytest.approx(monomial_integral(a, b, c), abs=1e-10)

    def test_level_must_be_sane(self):
        with pytest.raises(EngineError):
            SphereQuadrature(1)

    def test_hemisphere_cosine_lune_orthogonal_axes(self):
        # Oracle: cosine density on a hemisphere integrated over another
        # hemisphere gives (1 + n.m)/2; orthogonal axes give exactly 1/2.
        q = SphereQuadrature(17)

        def f(p):
            return np.where((p @ X) > 0, np.clip(p @ Z, 0.0, None) / math.pi, 0.0)

        assert q.integrate(f, split_axes=(Z, X)) == pytest.approx(0.5, abs=1e-9)

    def test_hemisphere_cosine_lune_random_axes(self):
        q = SphereQuadrature(17)
        rng = np.random.default_rng(2026)
        worst = 0.0
        for _ in range(100):
            n, m = rand_unit(rng), rand_unit(rng)

            def f(p):
                return np.where((p @ m) > 0, np.clip(p @ n, 0.0, None) / math.pi, 0.0)

            got = q.integrate(f, split_axes=(n, m))
            worst = max(worst, abs(got - 0.5 * (1.0 + n @ m)))
        assert worst < 1e-6

    def test_lune_with_nearly_parallel_axes(self):
        q = SphereQuadrature(17)
        n = rand_unit(np.random.default_rng(5))
        m = n + 1e-6 * np.array([0.3, -0.4, 0.1])
        m /= np.linalg.norm(m)

        def f(p):
            return np.where((p @ m) > 0, np.clip(p @ n, 0.0, None) / math.pi, 0.0)

        assert q.integrate(f, split_axes=(n, m)) == pytest.approx(
            0.5 * (1.0 + n @ m), abs=1e-9
        )

    def test_double_hemisphere_total_variation(self):
        # 0.5 * integral of ||z.l| - |x.l|| / (2 pi) over the sphere.
        # Kinks lie on the circles of z, x and the two diagonal axes;
        # the exact value is sqrt(2) - 1.
        q = SphereQuadrature(17)
        d1 = (Z + X) / math.sqrt(2.0)
        d2 = (Z - X) / math.sqrt(2.0)

        def f(p):
            return np.abs(np.abs(p @ Z) - np.abs(p @ X)) / (2.0 * math.pi)

        tv = 0.5 * q.integrate(f, split_axes=(Z, X, d1, d2))
        assert tv == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-9)

    def test_rejects_zero_split_axis(self):
        with pytest.raises(EngineError):
            SphereQuadrature(5).nodes(split_axes=(np.zeros(3),))


class TestMonteCarlo:
    def test_uniform_sphere_mean(self):
        mc = MonteCarlo(200_000, seed=13)
        est = mc.mean(sample_sphere, lambda p: np.clip(p @ Z, 0.0, None), "t1")
        assert est.stderr is not None and est.stderr > 0
        assert abs(est.value - 0.25) < est.tolerance

    def test_bit_identical_replay(self):
        a = MonteCarlo(70_000, seed=4).mean(sample_sphere, lambda p: p[:, 2] ** 2, "t2")
        b = MonteCarlo(70_000, seed=4).mean(sample_sphere, lambda p: p[:, 2] ** 2, "t2")
        assert a.value == b.value and a.stderr == b.stderr

    def test_labels_separate_streams(self):
        a = MonteCarlo(10_000, seed=4).mean(sample_sphere, lambda p: p[:, 2], "u")
        b = MonteCarlo(10_000, seed=4).mean(sample_sphere, lambda p: p[:, 2], "v")
        assert a.value != b.value

    def test_blocks_partition_n(self):
        mc = MonteCarlo(2 * MC_BLOCK + 17, seed=1)
        sizes = [m for _, m in mc.blocks()]
        assert sizes == [MC_BLOCK, MC_BLOCK, 17]

    def test_sample_at_regenerates(self):
        mc = MonteCarlo(MC_BLOCK + 50, seed=8)
        idx = MC_BLOCK + 7
        batch = sample_sphere(mc.block_stream(1, "w"), 50)
        assert np.array_equal(mc.sample_at(idx, sample_sphere, "w"), batch[7])

    def test_estimate_tolerance_is_three_sigma(self):
        est = MonteCarlo(5_000, seed=2).mean(sample_sphere, lambda p: p[:, 0], "s")
        assert est.tolerance == pytest.approx(3.0 * est.stderr)

    def test_rejects_tiny_n(self):
        with pytest.raises(EngineError):
            MonteCarlo(1)


class TestParseEngine:
    def test_closed(self):
        assert isinstance(parse_engine("closed"), ClosedForm)

    def test_quad_level(self):
        eng = parse_engine("quad:17")
        assert isinstance(eng, SphereQuadrature) and eng.level == 17
        assert eng.spec == "quad:17"

    def test_mc_with_seed(self):
        eng = parse_engine("mc:1000000", seed=99)
        assert isinstance(eng, MonteCarlo)
        assert eng.n_samples == 1_000_000 and eng.seed == 99
        assert eng.spec == "mc:1000000"

    @pytest.mark.parametrize(
        "bad", ["", "quad", "quad:x", "mc", "mc:ten", "fft:3", "closed:1"]
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(EngineError):
            parse_engine(bad)

    def test_closed_form_estimate_is_tight(self):
        est = ClosedForm().estimate(0.5)
        assert est.matches(0.5) and not est.matches(0.5 + 1e-6)
