import random

import pytest

from conftest import brute_force_sections, parity_refutes, tetrad_structure
from omspect import (GroupPresheaf, KleinPresheafError, NatTrans,
                     check_naturality, global_sections, klein4_presheaf,
                     outer_projection_presheaf, spectral_presheaf)
from omspect.logic import downset_algebra
from omspect.presheaves import (all_subobjects, full_subobject, sub_implication,
                                sub_intersection, sub_union, validate_subobject,
                                Presheaf, Subobject)


def test_spectral_fiber_sizes(cab18, peres33, dim2):
    for bundle in (cab18, peres33, dim2):
        sigma = spectral_presheaf(bundle.star)
        assert set(len(f) for f in sigma.fibers) <= {1, 2, 3}


def test_spectral_restriction_to_bottom(basis3):
    S = basis3.star
    sigma = spectral_presheaf(S)
    bottom = next(i for i, n in enumerate(S.nodes) if n.height == 0)
    for i, n in enumerate(S.nodes):
        if n.height == 1:
            mp = sigma.res(i, bottom)
            assert set(mp.values()) == {S.oml.one}


def test_spectral_restriction_picks_dominating_atom(cube8):
    S = cube8.star
    oml = S.oml
    a = oml.labels.index("a")
    b = oml.labels.index("b")
    top = next(i for i, n in enumerate(S.nodes) if n.height == 2)
    node_b = next(i for i, n in enumerate(S.nodes)
                  if n.height == 1 and b in n.atoms)
    sigma = spectral_presheaf(S)
    # atom a restricts to b' inside {0,b,b',1}
    assert sigma.res(top, node_b)[a] == oml.ortho[b]


def test_functoriality_everywhere(cab18, peres33, cube8, twoblock):
    for bundle in (cab18, peres33, cube8, twoblock):
        assert spectral_presheaf(bundle.star).check_functoriality() == []
        assert outer_projection_presheaf(bundle.star).check_functoriality() == []


def test_outer_presheaf_respects_bounds(cube8):
    S = cube8.star
    out = outer_projection_presheaf(S)
    oml = S.oml
    for (p, c) in S.poset.covers():
        mp = out.cover_res[(p, c)]
        assert mp[oml.zero] == oml.zero
        assert mp[oml.one] == oml.one


def test_outer_presheaf_example(cube8):
    S = cube8.star
    oml = S.oml
    a, b = oml.labels.index("a"), oml.labels.index("b")
    top = next(i for i, n in enumerate(S.nodes) if n.height == 2)
    node_a = next(i for i, n in enumerate(S.nodes)
                  if n.height == 1 and a in n.atoms)
    out = outer_projection_presheaf(S)
    assert out.res(top, node_a)[b] == oml.ortho[a]


def test_section_counts_match_brute_force(basis3, cube8, dim2, twoblock):
    expected = {"basis3": 3, "cube8": 3, "dim2": 2, "twoblock": 5}
    for bundle in (basis3, cube8, dim2, twoblock):
        sigma = spectral_presheaf(bundle.star)
        oracle = brute_force_sections(sigma)
        res = global_sections(sigma, mode="enumerate")
        assert res.count == len(oracle) == expected[bundle.name]
        assert {s.choice for s in res.sections} == {tuple(c) for c in oracle}


def test_cab18_refuted_and_parity_oracle_agrees(cab18):
    sigma = spectral_presheaf(cab18.star)
    res = global_sections(sigma, mode="exists")
    assert res.verdict == "no-global-section"
    assert res.trace
    tetrads = tetrad_structure(cab18.oml.rays, 4)
    assert parity_refutes(tetrads, len(cab18.oml.rays))


def test_peres33_refuted(peres33):
    sigma = spectral_presheaf(peres33.star)
    assert global_sections(sigma, mode="exists").verdict == "no-global-section"


def test_height_one_restriction_restores_sections(cab18):
    sigma = spectral_presheaf(cab18.star)
    res = global_sections(sigma, mode="exists", max_height=1)
    assert res.verdict == "sections-exist"


def test_search_invariant_under_relabeling(twoblock, cube8):
    rng = random.Random(3)
    for bundle in (twoblock, cube8):
        sigma = spectral_presheaf(bundle.star)
        want = global_sections(sigma, mode="count").count
        for _ in range(5):
            perm = list(range(sigma.base.n))
            rng.shuffle(perm)
            shuffled = sigma.permuted(perm)
            assert shuffled.check_functoriality() == []
            assert global_sections(shuffled, mode="count").count == want


def test_klein4_fibers_and_maps(cube8):
    K = klein4_presheaf(cube8.star)
    sizes = sorted(len(f) for f in K.fibers)
    assert sizes == [1, 2, 2, 2, 4]
    assert K.check_functoriality() == []
    assert K.check_homomorphisms() == []
    # coordinate maps are onto
    for (p, c), mp in K.cover_res.items():
        assert set(mp.values()) == set(K.fibers[c])


def test_klein4_single_block_sections(cube8):
    K = klein4_presheaf(cube8.star)
    res = global_sections(K, mode="enumerate")
    assert res.count == 4


def test_klein4_rejects_wrong_arity(block4, dim2):
    for bundle in (block4, dim2):
        with pytest.raises(KleinPresheafError):
            klein4_presheaf(bundle.star)


def test_naturality_identity_and_corruption(cube8):
    sigma = spectral_presheaf(cube8.star)
    ident = NatTrans(sigma, sigma, [dict(zip(f, f)) for f in sigma.fibers])
    assert check_naturality(ident) == []
    bad_comps = [dict(zip(f, f)) for f in sigma.fibers]
    top = next(i for i, n in enumerate(cube8.star.nodes) if n.height == 2)
    a, b, c = cube8.star.nodes[top].atoms
    bad_comps[top] = {a: b, b: a, c: c}
    report = check_naturality(NatTrans(sigma, sigma, bad_comps))
    assert report and all("square fails" in r for r in report)


def test_subobjects_closed_under_ops(basis3):
    sigma = spectral_presheaf(basis3.star)
    subs = all_subobjects(sigma)
    for s1 in subs[:12]:
        for s2 in subs[:12]:
            assert validate_subobject(sigma, sub_union(s1, s2))
            assert validate_subobject(sigma, sub_intersection(s1, s2))
            assert validate_subobject(sigma, sub_implication(sigma, s1, s2))


def test_subobject_heyting_bridge(cube8):
    """Subobjects of a one-point-fiber presheaf are the downsets of the base,
    with matching Heyting structure."""
    base = cube8.star.poset
    fibers = [("*",)] * base.n
    cover_res = {(p, c): {"*": "*"} for (p, c) in base.covers()}
    one_pt = Presheaf(base, fibers, cover_res)
    subs = all_subobjects(one_pt)
    H = downset_algebra(base)

    def to_mask(sub):
        return sum(1 << i for i in range(base.n) if sub.part[i])

    masks = sorted(to_mask(s) for s in subs)
    assert masks == H.elements
    by_mask = {to_mask(s): s for s in subs}
    for a in H.elements:
        for b in H.elements:
            assert to_mask(sub_union(by_mask[a], by_mask[b])) == H.join(a, b)
            assert to_mask(sub_intersection(by_mask[a], by_mask[b])) == H.meet(a, b)
            assert to_mask(sub_implication(one_pt, by_mask[a], by_mask[b])) == H.imp(a, b)


def test_group_presheaf_detects_broken_hom(cube8):
    K = klein4_presheaf(cube8.star)
    res = dict(K.cover_res)
    (p, c) = next((p, c) for (p, c) in res
                  if K.base.heights()[p] == 2 and K.base.heights()[c] == 1)
    bad = dict(res[(p, c)])
    # a homomorphism must fix the identity
    bad[(0, 0, 0)] = (1,)
    res[(p, c)] = bad
    broken = GroupPresheaf(K.base, K.fibers, res, K.labels)
    assert broken.check_homomorphisms() != []
