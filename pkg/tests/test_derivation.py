from __future__ import annotations

import pytest

from allenkit.derivation import (
    TableReport,
    derive_composition,
    derive_je,
    verify_table_by_derivation,
)
from allenkit.endpoints import oracle_compose
from allenkit.relations import (
    ALPHA1,
    B,
    BETA1,
    COMPOSITION_TABLE,
    D,
    DI,
    E,
    FI,
    FULL,
    M,
    MI,
    ORDER,
    OV,
    OVI,
    S,
    SI,
    RelationSet,
    compose,
)


def leaf_map(tree):
    return {leaf.conclusion: leaf for leaf in tree.leaves()}


def test_m_compose_d_replay():
    tree = derive_composition(M, D)
    leaves = leaf_map(tree)
    assert len(tree.leaves()) == 3
    assert set(leaves) == {S, OV, D}
    rules = {r: [app.rule for app in leaf.proof_steps()] for r, leaf in leaves.items()}
    assert rules[S] == ["M2=", "M5"]
    assert rules[D] == ["M2>", "M5"]
    assert rules[OV] == ["M2<", "M5", "M1", "M1"]
    assert leaves[OV].rule_count("M1") == 2


def test_m_compose_d_render():
    text = derive_composition(M, D).render()
    lines = text.splitlines()
    assert lines[0] == "(p,z) ∈ m; (z,q) ∈ d"
    assert "M3: c||p" in lines
    assert "M2(c||p, k||q)" in lines
    assert "    ⊢ (p,q) ∈ s via {k→c, u→zu, v→v}" in lines
    assert "    ⊢ (p,q) ∈ d via {k→k, l→t, u→zu, v→v}" in lines
    assert sum(line.lstrip().startswith("⊢") for line in lines) == 3


@pytest.mark.parametrize("r1,r2,expected,depth", [
    (M, M, "b", 0),          # decided without any split
    (OV, OV, "b m ov", 1),   # alpha3 template: one end/start split
    (S, SI, "s e si", 1),    # alpha5
    (M, MI, "fi e f", 1),    # alpha4
])
def test_small_templates(r1, r2, expected, depth):
    tree = derive_composition(r1, r2)
    assert str(tree.conclusions()) == expected
    assert tree.depth() == depth


def test_beta_and_delta_entries():
    assert derive_composition(D, OV).conclusions() == BETA1
    assert derive_composition(D, DI).conclusions() == FULL
    assert derive_composition(D, DI).depth() >= 2


def test_je_derivation():
    tree = derive_je()
    leaves = tree.leaves()
    assert tree.conclusions() == FULL
    assert len(leaves) == 13
    assert all(leaf.conclusion is not None and leaf.contradiction is None for leaf in leaves)


def test_every_leaf_decides_one_relation():
    for r1 in ORDER:
        for r2 in ORDER:
            for leaf in derive_composition(r1, r2).leaves():
                assert leaf.contradiction is None or leaf.conclusion is None
                if leaf.contradiction is None:
                    assert leaf.conclusion is not None


def test_derivation_matches_oracle_directly():
    # no reference to the embedded constant: engine against model
    for r1 in ORDER:
        for r2 in ORDER:
            assert derive_composition(r1, r2).conclusions() == oracle_compose(r1, r2), (r1, r2)


def test_table_report_ok():
    report = verify_table_by_derivation()
    assert report.ok
    assert report.summary() == "169/169 derivation OK"


def test_table_report_flags_a_wrong_entry():
    wrong = dict(COMPOSITION_TABLE)
    wrong[M, D] = ALPHA1 | RelationSet.of(E)
    report = verify_table_by_derivation(wrong)
    assert not report.ok
    assert report.matched == 168
    assert report.mismatches == ["m o d: derived {ov s d}, missing {e}, unsound {}"]


def test_table_report_flags_the_printed_misprint():
    # the misprinted (ovi, fi) = alpha1; the derivation disagrees
    wrong = dict(COMPOSITION_TABLE)
    wrong[OVI, FI] = ALPHA1
    report = verify_table_by_derivation(wrong)
    assert report.matched == 168
    assert report.mismatches[0].startswith("ovi o fi: derived {di si ovi}")


def test_report_summary_formats():
    assert TableReport("x", matched=3, total=3).summary() == "3/3 x OK"
    assert TableReport("x", ["bad"], 2, 3).summary() == "2/3 x MISMATCH"


def test_si_d_is_alpha2_converse():
    assert derive_composition(SI, D).conclusions() == compose(SI, D)
    assert derive_composition(DI, D).conclusions() == compose(DI, D)


def test_spot_checks():
    bb = derive_composition(B, B)
    assert bb.depth() == 0 and str(bb.conclusions()) == "b"
    sm = derive_composition(S, M)
    assert len(sm.leaves()) == 1 and str(sm.conclusions()) == "b"
    ovovi = derive_composition(OV, OVI)
    distinct = {leaf.conclusion for leaf in ovovi.leaves() if leaf.conclusion}
    assert len(distinct) == 9 and ovovi.conclusions() == compose(OV, OVI)


def test_je_depth_bound():
    assert derive_je().depth() <= 3
