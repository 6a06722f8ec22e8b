import pytest

from omspect import (boolean_shadows, enumerate_bsub, enumerate_bsub_star,
                     planes_completion)
from omspect.bsub import bsub_to_json
from omspect.posets import BudgetExceededError


def heights(S):
    return sorted(n.height for n in S.nodes)


def test_cube8_star_counts(cube8):
    S = cube8.star
    assert heights(S) == [0, 1, 1, 1, 2]


def test_dim2_star_has_no_lines(dim2):
    S = dim2.star
    assert heights(S) == [0, 1]


def test_cab18_every_point_under_a_line(cab18):
    S = cab18.star
    pts = [i for i, n in enumerate(S.nodes) if n.height == 1]
    lns = [i for i, n in enumerate(S.nodes) if n.height == 2]
    for p in pts:
        assert any(S.poset.leq(p, l) for l in lns)


def test_star_node_sizes_and_heights(cab18):
    for n in cab18.star.nodes:
        assert n.size == 2 ** (n.height + 1)
        assert len(n.element_ids) == n.size


def test_full_enumeration_matches_star(cube8, twoblock, basis3, dim2):
    for bundle in (cube8, twoblock, basis3, dim2):
        star = bundle.star
        capped = enumerate_bsub(bundle.oml, max_height=2)
        assert [n.atoms for n in capped.nodes] == [n.atoms for n in star.nodes]


def test_cube8_full_has_no_planes(cube8):
    full = enumerate_bsub(cube8.oml)
    assert heights(full) == [0, 1, 1, 1, 2]


def test_twoblock_full_has_no_planes(twoblock):
    full = enumerate_bsub(twoblock.oml)
    assert max(n.height for n in full.nodes) == 2


def test_block4_full_contains_a_plane(block4):
    full = enumerate_bsub(block4.oml)
    hs = heights(full)
    assert hs.count(3) == 1
    assert hs == [0] + [1] * 7 + [2] * 6 + [3]


def test_every_line_covers_three_points(cube8, cab18, peres33):
    for bundle in (cube8, cab18, peres33):
        S = bundle.star
        for i, n in enumerate(S.nodes):
            if n.height != 2:
                continue
            below = [j for j, m in enumerate(S.nodes)
                     if m.height == 1 and S.poset.leq(j, i)]
            assert len(below) == 3


def test_grading(cab18):
    S = cab18.star
    for (p, c) in S.poset.covers():
        assert S.nodes[p].height == S.nodes[c].height + 1


def test_budget_guard(cab18):
    with pytest.raises(BudgetExceededError):
        enumerate_bsub(cab18.oml, budget=5)


def test_planes_completion_noop_without_planes(cube8):
    S = cube8.star
    P3 = planes_completion(S)
    assert [n.atoms for n in P3.nodes] == [n.atoms for n in S.nodes]


def test_planes_completion_block4(block4):
    P3 = planes_completion(block4.star)
    planes = [n for n in P3.nodes if n.height == 3]
    assert len(planes) == 1
    plane = planes[0]
    idx = P3.nodes.index(plane)
    below = [P3.nodes[j].height for j in range(len(P3.nodes))
             if j != idx and P3.poset.leq(j, idx)]
    assert sorted(below) == [0] + [1] * 7 + [2] * 6


def test_planes_completion_matches_full_enumeration(cab18, block4):
    for bundle in (block4, cab18):
        P3 = planes_completion(bundle.star)
        full3 = enumerate_bsub(bundle.oml, max_height=3)
        assert sorted(n.atoms for n in P3.nodes) == sorted(n.atoms for n in full3.nodes)


def test_cab18_has_nine_planes(cab18):
    P3 = planes_completion(cab18.star)
    planes = [n for n in P3.nodes if n.height == 3]
    assert len(planes) == 9
    block_atom_sets = sorted(b.atoms for b in cab18.oml.blocks)
    assert sorted(n.atoms for n in planes) == block_atom_sets


def test_shadows_enumerate_the_full_poset(cube8, block4):
    for bundle in (cube8, block4):
        P3 = planes_completion(bundle.star)
        shadows = boolean_shadows(P3)
        full = enumerate_bsub(bundle.oml)
        assert len(shadows) == len(full.nodes)
        assert len({s.node_ids for s in shadows}) == len(shadows)
        # every shadow is a downset of the height-3 poset
        for s in shadows:
            for i in s.node_ids:
                m = P3.poset.down[i]
                while m:
                    j = (m & -m).bit_length() - 1
                    assert j in s.node_ids
                    m &= m - 1


def test_trivial_model_single_shadow():
    from omspect import build_oml_from_greechie
    oml = build_oml_from_greechie([["a", "b"]])
    P3 = planes_completion(enumerate_bsub_star(oml))
    # {0,1} and {0,a,b,1}
    assert len(boolean_shadows(P3)) == 2


def test_dot_and_json_emission(cube8):
    S = cube8.star
    dot = S.to_dot()
    assert dot.startswith("digraph") and "rank=same" in dot
    payload = bsub_to_json(S)
    assert '"variant": "star"' in payload
