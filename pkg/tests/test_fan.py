import json
import threading

import pytest

from toricslag.fan import (
    FanError,
    enumerate_strata,
    load_fan,
    make_fan,
    preset_fan,
    surface_curve_selfintersections,
)

P2_DOC = {"dim": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]]}

PRESETS = ["p1", "p2", "pn(3)", "pn(4)", "p1xp1", "hirzebruch(0)", "hirzebruch(1)", "hirzebruch(2)",
           "hirzebruch(3)", "blp_p2", "blpq_p2", "blp_pn(3)"]
SURFACES = ["p2", "p1xp1", "hirzebruch(1)", "hirzebruch(2)", "hirzebruch(3)", "blp_p2", "blpq_p2"]


def test_load_p2():
    f = load_fan(json.dumps(P2_DOC))
    assert f.n_rays == 3 and len(f.max_cones) == 3


def test_load_key_order_irrelevant():
    doc = {"max_cones": P2_DOC["max_cones"], "rays": P2_DOC["rays"], "dim": 2}
    assert load_fan(doc) == load_fan(P2_DOC)


def test_non_primitive_ray():
    doc = dict(P2_DOC, rays=[[2, 0], [0, 1], [-1, -1]])
    with pytest.raises(FanError, match="non-primitive ray 0"):
        load_fan(doc)


def test_incomplete_fan():
    doc = dict(P2_DOC, max_cones=[[0, 1], [2, 0]])
    with pytest.raises(FanError, match="incomplete fan"):
        load_fan(doc)


def test_non_smooth_cone():
    doc = {"dim": 2, "rays": [[1, 0], [1, 2], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]]}
    with pytest.raises(FanError, match="non-smooth cone"):
        load_fan(doc)


def test_parse_error():
    with pytest.raises(FanError, match="parse error"):
        load_fan("{not json")
    with pytest.raises(FanError, match="parse error"):
        load_fan({"dim": 2})


def test_unknown_preset():
    with pytest.raises(FanError):
        preset_fan("p7x")


@pytest.mark.parametrize("name", PRESETS)
def test_presets_validate(name):
    f = preset_fan(name)
    g = make_fan(f.dim, f.rays, f.max_cones)
    assert g == f
    assert f.picard_rank == f.n_rays - f.dim


@pytest.mark.parametrize("name,rays,cones", [("blp_p2", 4, 4), ("pn(3)", 4, 4), ("p1xp1", 4, 4),
                                             ("blpq_p2", 5, 5), ("blp_pn(3)", 5, 6)])
def test_preset_sizes(name, rays, cones):
    f = preset_fan(name)
    assert (f.n_rays, len(f.max_cones)) == (rays, cones)


def test_blp_p2_is_hirzebruch_1():
    f = preset_fan("blp_p2")
    assert set(f.rays) == {(1, 0), (0, 1), (-1, -1), (1, 1)}
    assert sorted(surface_curve_selfintersections(f).values()) == sorted(
        surface_curve_selfintersections(preset_fan("hirzebruch(1)")).values())


def test_blp_pn3_rays():
    f = preset_fan("blp_pn(3)")
    assert set(f.rays) == {(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1), (1, 1, 1)}


@pytest.mark.parametrize("name,divisors,points", [("p2", 3, 3), ("blp_p2", 4, 4), ("p1xp1", 4, 4)])
def test_strata_counts(name, divisors, points):
    s = enumerate_strata(preset_fan(name))
    assert sum(x.codim == 1 for x in s) == divisors
    assert sum(x.codim == 2 for x in s) == points
    assert [x.codim for x in s] == sorted(x.codim for x in s)


@pytest.mark.parametrize("name", PRESETS)
def test_strata_are_the_nonzero_cones(name):
    f = preset_fan(name)
    from itertools import combinations
    faces = {tuple(sorted(c)) for m in f.max_cones for k in range(1, f.dim + 1) for c in combinations(m, k)}
    assert {s.cone for s in enumerate_strata(f)} == faces


def test_selfintersections():
    assert set(surface_curve_selfintersections(preset_fan("p2")).values()) == {1}
    si = surface_curve_selfintersections(preset_fan("blp_p2"))
    f = preset_fan("blp_p2")
    assert si[f.rays.index((1, 1))] == -1
    assert sorted(surface_curve_selfintersections(preset_fan("hirzebruch(2)")).values()).count(-2) == 1


@pytest.mark.parametrize("name", SURFACES)
def test_euler_relation(name):
    f = preset_fan(name)
    c = [-v for v in surface_curve_selfintersections(f).values()]
    assert sum(c) == 3 * f.n_rays - 12
    assert f.n_rays == len(f.max_cones)


def test_selfintersections_need_surface():
    with pytest.raises(ValueError):
        surface_curve_selfintersections(preset_fan("pn(3)"))


@pytest.mark.parametrize("name", PRESETS)
def test_single_entry_mutation_detected_or_valid(name):
    """Adding 1 to one ray entry either fails validation or still gives a smooth complete fan."""
    f = preset_fan(name)
    for i, r in enumerate(f.rays):
        for a in range(f.dim):
            rays = [list(x) for x in f.rays]
            rays[i][a] += 1
            try:
                g = make_fan(f.dim, rays, f.max_cones)
            except FanError:
                continue
            # a surviving mutation must itself be a genuine fan: every cone unimodular
            from toricslag.linalg import det_int
            assert all(abs(det_int([g.rays[j] for j in c])) == 1 for c in g.max_cones)


def test_p2_mutations_all_rejected():
    f = preset_fan("p2")
    for i in range(3):
        for a in range(2):
            rays = [list(x) for x in f.rays]
            rays[i][a] += 1
            with pytest.raises(FanError):
                make_fan(2, rays, f.max_cones)


def test_roundtrip_document():
    f = preset_fan("blpq_p2")
    g = load_fan(json.dumps(f.to_dict()))
    assert g == f and g.basis == f.basis


def test_concurrent_preset_access():
    out = []

    def work():
        out.append(preset_fan("blp_p2"))

    ts = [threading.Thread(target=work) for _ in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert all(x is out[0] for x in out)
