import numpy as np
import pytest

from fksim.geometry import DomainSpec, contains, singularity_distance
from fksim.potentials import (InteractionSpec, LineChargeSpec, PotentialSpec,
                              PowerPart, RieszPart, SpecError)
from fksim.streams import substream

COULOMB = PotentialSpec(dimension=2, singular=RieszPart(1.0, 1.0))


class TestContains:
    def test_ball_interior(self):
        d = DomainSpec(kind="ball", radius=1.0)
        assert contains(d, [0.5, 0.0])

    def test_ball_boundary_is_outside(self):
        d = DomainSpec(kind="ball", radius=1.0)
        assert not contains(d, [1.0, 0.0])

    def test_full_excludes_singular_point(self):
        d = DomainSpec(kind="full")
        assert not contains(d, [0.0, 0.0], COULOMB)
        assert contains(d, [0.1, 0.0], COULOMB)

    def test_annulus(self):
        d = DomainSpec(kind="annulus", r_in=0.5, r_out=2.0)
        assert contains(d, [1.0, 0.0])
        assert not contains(d, [0.3, 0.0])
        assert not contains(d, [2.5, 0.0])

    def test_ball_complement(self):
        d = DomainSpec(kind="ball_complement", radius=1.0)
        assert contains(d, [2.0, 0.0])
        assert not contains(d, [0.5, 0.0])

    def test_halfspace(self):
        d = DomainSpec(kind="halfspace", normal=(1.0, 0.0), offset=0.0)
        assert contains(d, [-1.0, 5.0])
        assert not contains(d, [0.0, 0.0])  # boundary is outside

    def test_dimension_mismatch_rejected(self):
        d = DomainSpec(kind="ball", radius=1.0, center=(0.0, 0.0))
        with pytest.raises(SpecError):
            contains(d, [0.1, 0.2, 0.3])

    def test_per_particle_blocks(self):
        spec = InteractionSpec(
            n=2,
            confining=PotentialSpec(dimension=2, confining=PowerPart(2.0, 1.0)),
            pair=RieszPart(1.0, 1.0))
        d = DomainSpec(kind="ball", radius=2.0)
        inside = contains(d, np.array([0.5, 0.0, -0.5, 0.0]), spec,
                          per_particle=(2, 2))
        assert inside
        # one particle outside the ball kills the configuration
        outside = contains(d, np.array([0.5, 0.0, 3.0, 0.0]), spec,
                           per_particle=(2, 2))
        assert not outside

    def test_domain_inclusion_monotone(self):
        small = DomainSpec(kind="ball", radius=0.8)
        big = DomainSpec(kind="ball", radius=1.5)
        x = substream(31, "geometry-mono").normal(size=(5000, 2))
        in_small = contains(small, x)
        in_big = contains(big, x)
        assert np.all(~in_small | in_big)

    def test_unknown_kind_rejected(self):
        with pytest.raises(SpecError):
            DomainSpec(kind="cube")


class TestSingularityDistance:
    def test_point_singular(self):
        assert singularity_distance([3.0, 4.0], COULOMB) == pytest.approx(5.0)

    def test_interacting_min_pairwise(self):
        spec = InteractionSpec(
            n=2,
            confining=PotentialSpec(dimension=2, confining=PowerPart(2.0, 1.0)),
            pair=RieszPart(1.0, 1.0))
        d = singularity_distance(np.array([[0.0, 0.0], [1.0, 0.0]]), spec)
        assert d == pytest.approx(1.0)

    def test_line_charge_axis_distance(self):
        spec = LineChargeSpec(radial_profile=RieszPart(1.0, 1.0),
                              confining=PotentialSpec(dimension=3))
        assert singularity_distance([3.0, 4.0, 7.0], spec) == pytest.approx(5.0)

    def test_nonsingular_is_inf(self):
        spec = PotentialSpec(dimension=2, confining=PowerPart(2.0, 1.0))
        assert singularity_distance([1.0, 1.0], spec) == np.inf

    def test_continuity_along_trajectory(self):
        # successive distances differ by at most the displacement norm
        rng = substream(31, "geometry-cont")
        x = np.cumsum(rng.normal(scale=0.1, size=(500, 2)), axis=0) + 2.0
        d = singularity_distance(x, COULOMB)
        steps = np.linalg.norm(np.diff(x, axis=0), axis=1)
        assert np.all(np.abs(np.diff(d)) <= steps + 1e-12)
