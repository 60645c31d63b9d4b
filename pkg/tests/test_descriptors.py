import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smigan import chem
from smigan.descriptors import DESCRIPTOR_NAMES, compute_descriptors
from smigan.synthetic import random_molecule

IDX = {name: i for i, name in enumerate(DESCRIPTOR_NAMES)}


def vec(smiles: str) -> np.ndarray:
    return compute_descriptors(chem.parse(smiles))


def test_schema_is_twenty_wide():
    assert len(DESCRIPTOR_NAMES) == 20
    assert vec("CCO").shape == (20,)


def test_ethanol_values():
    v = vec("CCO")
    assert v[IDX["heavy_atoms"]] == 3
    assert v[IDX["o_count"]] == 1
    assert v[IDX["ring_count"]] == 0
    assert v[IDX["hbd_count"]] == 1
    assert v[IDX["hba_count"]] == 1
    assert v[IDX["carbon_fraction"]] == pytest.approx(2 / 3)


def test_benzene_values():
    v = vec("c1ccccc1")
    assert v[IDX["aromatic_rings"]] == 1
    assert v[IDX["carbon_fraction"]] == 1.0
    assert v[IDX["hbd_count"]] == 0


def test_pyridine_values():
    v = vec("c1ccncc1")
    assert v[IDX["n_count"]] == 1
    assert v[IDX["aromatic_rings"]] == 1
    assert v[IDX["hba_count"]] == 1


def test_molecular_weight_ethanol():
    # C2H6O: 2*12.011 + 6*1.008 + 15.999
    assert vec("CCO")[IDX["mol_weight"]] == pytest.approx(46.069, abs=1e-3)


def test_rotatable_bonds_butane_vs_amide():
    assert vec("CCCC")[IDX["rotatable_bonds"]] == 1
    assert vec("CC(=O)NC")[IDX["rotatable_bonds"]] == 0  # amide C-N excluded


def test_fused_aromatic_pair_naphthalene():
    v = vec("c1ccc2ccccc2c1")
    assert v[IDX["fused_aromatic_pairs"]] == 1
    assert v[IDX["ring_count"]] == 2


def test_sp3_fraction():
    assert vec("CCCC")[IDX["sp3_carbon_fraction"]] == 1.0
    assert vec("c1ccccc1")[IDX["sp3_carbon_fraction"]] == 0.0


def test_net_charge():
    assert vec("C[N+](C)(C)C")[IDX["net_charge"]] == 1


def test_max_ring_size_macrocycle():
    v = vec("C1CCCCCCCCCCCCC1")
    assert v[IDX["max_ring_size"]] == 14


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_descriptor_consistency_properties(seed):
    g = random_molecule(np.random.default_rng(seed), n_heavy=(3, 14),
                        halogen_prob=0.1, charge_prob=0.1)
    v = compute_descriptors(g)
    assert np.all(np.isfinite(v))
    heavy = v[IDX["heavy_atoms"]]
    nos = v[IDX["n_count"]] + v[IDX["o_count"]] + v[IDX["s_count"]]
    assert v[IDX["nos_ratio"]] * heavy == pytest.approx(nos)
    assert v[IDX["aromatic_rings"]] + v[IDX["aliphatic_rings"]] == v[IDX["ring_count"]]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_descriptor_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    g = random_molecule(rng, n_heavy=(3, 12))
    base = compute_descriptors(g)
    for _ in range(3):
        priority = rng.permutation(len(g.atoms)).tolist()
        g2 = chem.parse(chem.render_smiles(g, priority))
        assert np.array_equal(compute_descriptors(g2), base)
