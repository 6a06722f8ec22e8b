import itertools
import random

import pytest

from conftest import range_contained, tetrad_structure
from omspect import (Block, IllegalPastingError, IncompleteContextError,
                     build_oml_from_greechie, build_oml_from_rays,
                     validate_oml)
from omspect.linalg import identity, mat_mul
from omspect.oml import FiniteOML, block_elements
from omspect.posets import FinitePoset


def test_basis3_single_context(basis3):
    oml = basis3.oml
    assert oml.n == 8
    assert len(oml.blocks) == 1
    assert validate_oml(oml).ok


def test_cab18_block_structure(cab18):
    oml = cab18.oml
    assert len(oml.blocks) == 9
    assert all(len(b.atoms) == 4 for b in oml.blocks)
    per_ray = {a: 0 for a in oml.atoms()}
    for b in oml.blocks:
        for a in b.atoms:
            per_ray[a] += 1
    assert set(per_ray.values()) == {2}
    assert validate_oml(oml).ok
    # cross-check the tetrads against an independent clique scan
    tetrads = tetrad_structure(oml.rays, 4)
    assert len(tetrads) == 9


def test_cab18_strict_mode_raises(cab18):
    with pytest.raises(IncompleteContextError):
        build_oml_from_rays(cab18.oml.rays, 4, 0, on_incomplete="error")


def test_peres33_builds_with_completion(peres33):
    oml = peres33.oml
    assert oml.ring == 2
    assert len(oml.rays) == 33
    assert len(oml.atoms()) == 57
    assert len(oml.blocks) == 40
    assert validate_oml(oml).ok


def test_peres33_strict_mode_raises(peres33):
    with pytest.raises(IncompleteContextError):
        build_oml_from_rays(peres33.oml.rays, 3, 2, on_incomplete="error")


def test_skip_mode_rejects_blockless_rays():
    # two orthogonal rays plus one touching nothing: no 3-context covers (1,1,1)
    with pytest.raises(IncompleteContextError):
        build_oml_from_rays([(1, 0, 0), (0, 1, 0), (1, 1, 1)], 3, 0,
                            on_incomplete="skip")


def test_complete_mode_adjoins_complement():
    oml = build_oml_from_rays([(1, 0, 0), (0, 1, 0), (1, 1, 1)], 3, 0,
                              on_incomplete="complete")
    assert validate_oml(oml).ok
    # the orthogonal pair gains a rank-1 third atom; the isolated ray gains
    # a single rank-2 complement
    sizes = sorted(len(b.atoms) for b in oml.blocks)
    assert sizes == [2, 3]
    ranks = sorted(oml.rank(a) for b in oml.blocks for a in b.atoms)
    assert ranks == [1, 1, 1, 1, 2]


def test_greechie_single_block_is_cube(cube8):
    assert cube8.oml.n == 8
    assert validate_oml(cube8.oml).ok


def test_greechie_two_blocks_paste_to_twelve(twoblock):
    # 8 + 8 elements sharing {0, c, c', 1}
    oml = twoblock.oml
    assert oml.n == 12
    assert validate_oml(oml).ok
    # the shared coatom sits above atoms from both blocks
    cprime = oml.labels.index("a+b+d+e")
    for atom_label in ("a", "b", "d", "e"):
        assert oml.leq(oml.labels.index(atom_label), cprime)


def test_greechie_dim2_degenerate(dim2):
    oml = dim2.oml
    assert oml.n == 4
    a, b = (oml.labels.index(x) for x in ("a", "b"))
    assert oml.ortho[a] == b
    assert validate_oml(oml).ok


def test_greechie_rejects_double_overlap():
    with pytest.raises(IllegalPastingError):
        build_oml_from_greechie([["a", "b", "c"], ["a", "b", "d"]])


def test_greechie_rejects_tiny_blocks():
    with pytest.raises(IllegalPastingError):
        build_oml_from_greechie([["a"]])


def test_greechie_contained_blocks_dropped():
    oml = build_oml_from_greechie([["a", "b", "c"], ["a", "b", "c"], ["a", "b"]])
    assert len(oml.blocks) == 1


def test_greechie_triangle_loop_flagged_by_validator():
    oml = build_oml_from_greechie([["a", "b", "x"], ["x", "c", "y"], ["y", "d", "a"]])
    report = validate_oml(oml)
    assert not report.ok
    assert any("missing" in v or "no block" in v for v in report.violations)


def test_greechie_four_loop_is_valid():
    oml = build_oml_from_greechie(
        [["a", "b", "x"], ["x", "c", "y"], ["y", "d", "z"], ["z", "e", "a"]])
    assert validate_oml(oml).ok


def test_validator_negative_control(cube8):
    good = cube8.oml
    bad_ortho = list(good.ortho)
    a, b = good.labels.index("a"), good.labels.index("b")
    bad_ortho[a] = b  # not an involution anymore
    broken = FiniteOML("greechie", good.poset, bad_ortho, good.zero, good.one,
                       good.blocks, good.labels, atoms_below=good.atoms_below)
    report = validate_oml(broken)
    assert not report.ok


def test_matrix_exactness(cab18):
    oml = cab18.oml
    for p in oml.proj:
        assert mat_mul(p.matrix, p.matrix) == p.matrix


def test_deduplication_soundness(cab18):
    oml = cab18.oml
    seen = {}
    for bi in range(len(oml.blocks)):
        k = len(oml.blocks[bi].atoms)
        for size in range(k + 1):
            for sub in itertools.combinations(range(k), size):
                e = oml.block_element(bi, sub)
                mat = oml.proj[e].matrix
                assert seen.setdefault(mat, e) == e


def test_order_coherence_random_pairs(cab18, peres33):
    rng = random.Random(7)
    for oml in (cab18.oml, peres33.oml):
        pairs = [(rng.randrange(oml.n), rng.randrange(oml.n)) for _ in range(60)]
        for i, j in pairs:
            by_product = mat_mul(oml.proj[j].matrix, oml.proj[i].matrix) \
                == oml.proj[i].matrix
            by_ranges = range_contained(oml.proj[i].matrix, oml.proj[j].matrix)
            assert oml.leq(i, j) == by_product == by_ranges


def test_block_meets_are_poset_meets(cab18, twoblock):
    for oml in (cab18.oml, twoblock.oml):
        for bi in range(len(oml.blocks)):
            elems = sorted(block_elements(oml, bi))
            for x, y in itertools.combinations(elems, 2):
                assert oml.poset.glb(x, y) is not None


def test_ortho_complement_is_identity_minus(cab18):
    oml = cab18.oml
    eye = identity(oml.dim)
    for i in range(oml.n):
        mat = oml.proj[i].matrix
        comp = oml.proj[oml.ortho[i]].matrix
        assert tuple(tuple(a + b for a, b in zip(r1, r2))
                     for r1, r2 in zip(mat, comp)) == eye


def test_deterministic_element_order(cab18):
    rebuilt = build_oml_from_rays(cab18.oml.rays, 4, 0, on_incomplete="skip")
    assert rebuilt.labels == cab18.oml.labels
    assert rebuilt.poset.down == cab18.oml.poset.down
