import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from roughhj.errors import ConfigError, DomainError
from roughhj.hamiltonian import HamiltonianSpec, h_abs_1d, h_paper
from roughhj.pde import (
    Grid,
    GridFunction,
    SolveConfig,
    abs_diff,
    cone_cap,
    dilate_axis,
    erode_axis,
    evolve,
    ic_paper,
    read_csv,
    sized_grid,
    solve_value_at,
    step_segment,
    write_csv,
)
from roughhj.pde.morphology import cells_for, dilate_cells, erode_cells
from roughhj.signal import DrivingPath, MonotoneSegment, zigzag

H = h_paper()
MORPH = SolveConfig()
LF = SolveConfig(engine="lax_friedrichs")


def window_oracle(a, k, reduce):
    n = len(a)
    return np.array([reduce(a[max(0, i - k) : min(n, i + k + 1)]) for i in range(n)])


# ---------------------------------------------------------------- grid


def test_grid_shape_and_origin():
    g = Grid(2, 1.0, 0.1)
    assert g.shape == (21, 21)
    assert g.axis[g.n_half] == 0.0
    assert g.index_of((0, 0)) == (10, 10)
    with pytest.raises(DomainError):
        g.index_of((1.5, 0))


@pytest.mark.parametrize("args", [(3, 1, 0.1), (2, 1, 0), (2, -1, 0.1)])
def test_grid_rejects(args):
    with pytest.raises(ConfigError):
        Grid(*args)


def test_grid_function_validates():
    g = Grid(1, 1.0, 0.5)
    with pytest.raises(ConfigError):
        GridFunction(g, np.zeros(3))
    with pytest.raises(ConfigError):
        GridFunction(g, np.array([0, 0, np.nan, 0, 0]))


@pytest.mark.parametrize("dim", [1, 2])
def test_csv_roundtrip(tmp_path, dim):
    g = Grid(dim, 0.6, 0.2)
    f = GridFunction(g, np.random.default_rng(0).normal(size=g.shape))
    back = read_csv(write_csv(f, tmp_path / "f.csv"), 0.2)
    np.testing.assert_array_equal(back.values, f.values)


# ---------------------------------------------------------------- initial data


@pytest.mark.parametrize("pt, want", [((0, 0), 0.0), ((1, 1), 1.0), ((0.5, 2), 2.0)])
def test_ic_paper_values(pt, want):
    assert ic_paper(Grid(2, 3.0, 0.5), 1.0).at(pt) == want


def test_ic_paper_needs_room():
    with pytest.raises(ConfigError):
        ic_paper(Grid(2, 1.0, 0.5), 2.0)


def test_ic_paper_matches_abs_diff_on_ball():
    g = Grid(2, 3.0, 0.05)
    assert ic_paper(g, 2.0).sup_distance(abs_diff(g), 1.0) == 0.0
    assert ic_paper(g, 2.0).sup_distance(abs_diff(g), 1.2) > 0.0


def test_cone_cap():
    g = Grid(2, 3.0, 0.5)
    f = cone_cap(g, 3.0, 2.0, 1.0)
    assert f.at((2, -2)) == 3.0
    assert f.at((3, 0)) == 2.0


# ---------------------------------------------------------------- morphology


def test_window_examples():
    a = np.array([0.0, 1, 0, 3, 2])
    np.testing.assert_array_equal(dilate_cells(a, 0, 1), [1, 1, 3, 3, 3])
    np.testing.assert_array_equal(erode_cells(a, 0, 1), [0, 0, 0, 0, 2])
    f = GridFunction(Grid(1, 1.0, 0.5), a)
    np.testing.assert_array_equal(dilate_axis(f, 0, 0.5).values, [1, 1, 3, 3, 3])
    np.testing.assert_array_equal(erode_axis(f, 0, 0.5).values, [0, 0, 0, 0, 2])


def test_negative_radius():
    f = GridFunction(Grid(1, 1.0, 0.5), np.zeros(5))
    with pytest.raises(DomainError):
        dilate_axis(f, 0, -0.1)
    with pytest.raises(DomainError):
        erode_cells(f.values, 0, -1)


def test_cells_round_half_up():
    assert cells_for(0.25, 0.1) == 3
    assert cells_for(0.35, 0.1) == 4
    assert cells_for(0.0, 0.1) == 0


@settings(max_examples=200)
@given(arrays(float, st.integers(1, 40), elements=st.floats(-1e3, 1e3)), st.integers(0, 10))
def test_windows_match_oracle(a, k):
    np.testing.assert_array_equal(dilate_cells(a, 0, k), window_oracle(a, k, np.max))
    np.testing.assert_array_equal(erode_cells(a, 0, k), window_oracle(a, k, np.min))


def test_windows_along_second_axis():
    a = np.random.default_rng(4).normal(size=(7, 9))
    want = np.stack([window_oracle(row, 2, np.max) for row in a])
    np.testing.assert_array_equal(dilate_cells(a, 1, 2), want)


def test_opening_closing_identities():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        a = rng.normal(size=rng.integers(1, 65))
        k = int(rng.integers(0, 9))
        d, e = dilate_cells(a, 0, k), erode_cells(a, 0, k)
        np.testing.assert_array_equal(dilate_cells(erode_cells(d, 0, k), 0, k), d)
        np.testing.assert_array_equal(erode_cells(dilate_cells(e, 0, k), 0, k), e)


def test_axis_operators_do_not_commute():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    one = erode_cells(dilate_cells(a, 0, 1), 1, 1)
    other = dilate_cells(erode_cells(a, 1, 1), 0, 1)
    assert not np.array_equal(one, other)


# ---------------------------------------------------------------- segments


@pytest.mark.parametrize("cfg", [MORPH, LF], ids=["morph", "lf"])
@pytest.mark.parametrize("delta", [0.7, -0.4])
def test_constant_is_preserved(cfg, delta):
    g = Grid(2, 2.0, 0.1)
    f = GridFunction(g, np.full(g.shape, 5.0))
    out = step_segment(f, MonotoneSegment(0, 1, delta), H, cfg)
    np.testing.assert_array_equal(out.values, f.values)


def test_abs_diff_fixed_point_on_up_segment():
    g = Grid(2, 3.0, 0.05)
    f = abs_diff(g)
    out = step_segment(f, MonotoneSegment(0, 1, 1.0), H, MORPH)
    assert out.sup_distance(f, 3.0 - 1.0 - 0.05) <= 1e-12


def test_lax_friedrichs_affine():
    g = Grid(2, 2.0, 0.1)
    f = GridFunction.from_function(g, lambda x, y: x + 0 * y)
    cfg = SolveConfig(engine="lax_friedrichs", cfl=0.4 / 2)
    out = step_segment(f, MonotoneSegment(0, 1, 0.5), H, cfg)
    steps = int(np.ceil(0.5 / (cfg.cfl * g.dx)))
    interior = g.sup_radius() < g.half_width - (steps + 1) * g.dx
    np.testing.assert_allclose(out.values[interior], f.values[interior] + 0.5, atol=1e-12)


def test_cfl_and_structure_checks():
    g = Grid(2, 1.0, 0.1)
    with pytest.raises(ConfigError):
        step_segment(abs_diff(g), MonotoneSegment(0, 1, 1), H, SolveConfig(engine="lax_friedrichs", cfl=0.9))
    smooth = HamiltonianSpec("sq", 2, lambda px, py: px**2 - py**2, (5.0, 5.0))
    with pytest.raises(ConfigError):
        step_segment(abs_diff(g), MonotoneSegment(0, 1, 1), smooth, MORPH)
    with pytest.raises(ConfigError):
        SolveConfig(engine="spectral")
    with pytest.raises(ConfigError):
        SolveConfig(m=0)


# ---------------------------------------------------------------- evolve


@pytest.mark.parametrize("cfg", [MORPH, LF], ids=["morph", "lf"])
def test_evolve_constant(cfg):
    p = zigzag(0.5, 2, 1)
    g = sized_grid(p, H, cfg, 0.1)
    f = GridFunction(g, np.full(g.shape, -2.5))
    np.testing.assert_array_equal(evolve(f, p, H, cfg).final.values, f.values)


def test_evolve_stationary_abs_diff():
    p = zigzag(1, 4, 1)
    g = sized_grid(p, H, MORPH, 0.05, 1.0)
    rep = evolve(abs_diff(g), p, H, MORPH)
    assert rep.trusted_radius >= 1.0
    assert rep.final.sup_distance(abs_diff(g), rep.trusted_radius) <= 1e-12


def test_evolve_reports_required_width():
    p = zigzag(1, 4, 1)
    with pytest.raises(ConfigError, match="need L >= 4.1"):
        evolve(abs_diff(Grid(2, 2.0, 0.05)), p, H, MORPH)


def test_report_json_is_deterministic():
    p = zigzag(0.5, 2, 1)
    g = sized_grid(p, H, MORPH, 0.1)
    a = evolve(ic_paper(g, 1.0), p, H, MORPH)
    b = evolve(ic_paper(g, 1.0), p, H, MORPH)
    assert a.to_json() == b.to_json()
    d = json.loads(a.to_json())
    assert d["segments"] == 2 and "wall_time" not in d
    assert d["dependence_radius"] == pytest.approx(1.0)


def test_snapshots_at_segment_ends():
    p = zigzag(0.5, 2, 1)
    rep = evolve(ic_paper(sized_grid(p, H, MORPH, 0.1), 1.0), p, H, MORPH, snapshots=True)
    assert [t for t, _ in rep.snapshots] == [0.0, 0.5, 1.0]


def test_flat_stretch_does_nothing():
    g = Grid(2, 3.0, 0.1)
    f = ic_paper(g, 1.0)
    flat = DrivingPath.from_knots([(0, 0), (1, 0)])
    assert evolve(f, flat, H, MORPH).final.sup_distance(f) == 0.0


def test_solve_value_at_examples():
    g = Grid(2, 3.0, 0.05)
    const = GridFunction(g, np.full(g.shape, 1.25))
    assert solve_value_at(const, zigzag(1, 2, 1), H, MORPH, [(0, 0)]) == [1.25]
    assert solve_value_at(abs_diff(g), zigzag(1, 2, 1), H, MORPH, [(0, 0)])[0] <= 1e-12
    assert solve_value_at(ic_paper(g, 2.0), zigzag(0.5, 1, 1), H, MORPH, [(0, 0)]) == [0.0]
    with pytest.raises(DomainError):
        solve_value_at(abs_diff(g), zigzag(1, 2, 1), H, MORPH, [(1.5, 0)])


# ---------------------------------------------------------------- structural properties


def _random_pairs(g, n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        f = rng.normal(size=g.shape)
        g2 = f + np.abs(rng.normal(size=g.shape))
        yield f, g2, float(rng.normal())


@pytest.mark.parametrize("cfg", [MORPH, SolveConfig(engine="lax_friedrichs", cfl=0.4 / 2)], ids=["morph", "lf"])
def test_monotone_contractive_commutes_with_constants(cfg):
    p = zigzag(0.3, 2, 1)
    g = sized_grid(p, H, cfg, 0.1)
    worst_order, worst_contract, worst_const = 0.0, 0.0, 0.0
    for f, h, c in _random_pairs(g, 100, 6):
        F, Hh = GridFunction(g, f), GridFunction(g, h)
        sf = evolve(F, p, H, cfg).final.values
        sh = evolve(Hh, p, H, cfg).final.values
        sc = evolve(F + c, p, H, cfg).final.values
        worst_order = max(worst_order, float(np.max(sf - sh)))
        worst_contract = max(worst_contract, float(np.max(np.abs(sf - sh)) - np.max(np.abs(f - h))))
        worst_const = max(worst_const, float(np.max(np.abs(sc - sf - c))))
    assert worst_order <= 1e-12
    assert worst_contract <= 1e-12
    assert worst_const <= 1e-12


def test_domain_of_dependence():
    p = zigzag(0.5, 2, 1)
    g = sized_grid(p, H, MORPH, 0.05, 1.0)
    f = ic_paper(g, 1.0)
    bumped = f.copy()
    bumped.values[g.sup_radius() > 2.0] += 10.0
    rep = evolve(f, p, H, MORPH)
    other = evolve(bumped, p, H, MORPH)
    assert rep.final.sup_distance(other.final, 2.0 - rep.dependence_radius) == 0.0
    assert rep.final.sup_distance(other.final, 2.0 - rep.dependence_radius + 2 * g.dx) > 0.0


def test_engines_agree_under_refinement():
    p = zigzag(1, 2, 1)
    gaps = []
    for dx in (0.2, 0.1, 0.05):
        vals = [
            evolve(ic_paper(sized_grid(p, H, cfg, dx), 1.0), p, H, cfg).final.at((0, 0))
            for cfg in (MORPH, LF)
        ]
        gaps.append(abs(vals[0] - vals[1]))
    assert gaps[0] > 0
    assert gaps[1] <= 0.5 * gaps[0] and gaps[2] <= 0.5 * gaps[1]


def test_trotter_refinement_converges():
    p = zigzag(0.5, 1, 1)
    g = sized_grid(p, H, MORPH, 0.02, 1.0)
    f = GridFunction.from_function(g, lambda x, y: np.sin(2 * x + y) + np.cos(x - 2 * y))
    ref = evolve(f, p, H, SolveConfig(m=512)).final
    errs = [evolve(f, p, H, SolveConfig(m=m)).final.sup_distance(ref, 1.0) for m in (2, 4, 8, 16)]
    assert all(b <= 0.5 * a for a, b in zip(errs, errs[1:]))


def test_one_dimensional_abs():
    # u_s = |u_x| moves a hat's support outward by the variation
    H1 = h_abs_1d()
    g = Grid(1, 3.0, 0.05)
    hat = GridFunction.from_function(g, lambda x: np.maximum(0.0, 1.0 - np.abs(x)))
    out = evolve(hat, DrivingPath.from_knots([(0, 0), (1, 0.5)]), H1, MORPH).final
    assert out.at(0.25) == 1.0
    assert out.at(1.5) == pytest.approx(0.0, abs=1e-12)
    assert out.at(1.0) == pytest.approx(0.5, abs=1e-12)
