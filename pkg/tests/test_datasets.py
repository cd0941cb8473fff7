import numpy as np
import pytest

from contextuality import datasets
from contextuality.datasets import DATASETS, load_dataset, verify_projector_dataset
from contextuality.quantum import nc_maximum, state_independence_report


@pytest.mark.parametrize("name", sorted(DATASETS))
def test_every_relation_holds(name):
    rep = verify_projector_dataset(load_dataset(name))
    assert rep.ok, rep.failures()
    assert all(c.deviation <= 1e-10 for c in rep.checks)


def test_corrupted_vector_is_caught():
    ds = load_dataset("yuoh13")
    ops = dict(ds.operators)
    ops["h0"] = ops["h0"] * 1.01
    broken = datasets.ProjectorSet(ds.name, ds.kind, ops, ds.vectors, ds.orthogonal, ds.bases, ds.relations, ds.marked)
    assert not verify_projector_dataset(broken).ok


def test_unknown_dataset():
    with pytest.raises(KeyError):
        load_dataset("nope")


def test_ceg18_structure():
    ds = load_dataset("ceg18")
    assert len(ds.operators) == 18
    assert len(ds.bases) == 9
    for v in ds.operators:
        assert sum(v in b for b in ds.bases) == 2


def test_yu_oh_operator_is_multiple_of_identity():
    rep = state_independence_report(datasets.yu_oh_inequality(), datasets.yu_oh_observables(), nc_bound=25)
    assert rep.proportional_to_identity
    assert abs(rep.identity_multiple - (25 + 8 / 3)) < 1e-10


def test_yu_oh_nc_maximum():
    assert nc_maximum(datasets.yu_oh_inequality()) == 25


def test_ceg18_inequality_values():
    q = datasets.ceg18_inequality()
    rep = state_independence_report(q, datasets.ceg18_observables())
    assert abs(rep.identity_multiple - 9) < 1e-10
    assert nc_maximum(q) == 7


def test_peres_mermin_observables_commute_in_lines():
    ops = datasets.peres_mermin_operators()
    for line in datasets.PM_ROWS + datasets.PM_COLUMNS:
        for a in line:
            for b in line:
                assert np.allclose(ops[a] @ ops[b], ops[b] @ ops[a])
