from npcchain.complex_core import euler_characteristic
from npcchain.morse import check_morse_conditions, kernel_rank, labeling_from_names, relator_check, \
    surjectivity_witnesses
from npcchain.words import multiply


def test_labeling_and_conditions(y1):
    lab = labeling_from_names(y1.Y)
    assert lab.k == 1
    assert len(lab.horizontal()) == 87
    conds = check_morse_conditions(y1.Y, lab)
    assert conds["C0"] and conds["C1"]


def test_kernel_rank_matches_euler_characteristic(y1):
    lab = labeling_from_names(y1.Y)
    ell = kernel_rank(y1.Y, lab)
    assert ell == 8 * 11 - 1
    # chi(F_ell x| F_k) = (1 - ell)(1 - k)
    assert euler_characteristic(y1.Y) == (1 - ell) * (1 - 1) == 0


def test_relators_vanish(y1):
    lab = labeling_from_names(y1.Y)
    assert relator_check(y1.Y, lab, y1.monodromy) == []


def test_inverse_images(y1):
    (aut,) = y1.monodromy.action.autos
    assert aut.verify_inverse()
    inv = aut.inverse()
    for i in range(1, aut.rank + 1):
        assert multiply(aut.apply(inv.apply((i,)))) == (i,)


def test_surjectivity_witnesses(y1):
    lab = labeling_from_names(y1.Y)
    wit = surjectivity_witnesses(lab, y1.monodromy)
    assert len(wit) >= 1
