import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smigan import auxdisc, chem
from smigan.auxdisc import (
    DegenerateLabels,
    InsufficientData,
    RandomForestModel,
    SchemaMismatch,
    StructuralRules,
    auc,
    auxiliary_reward,
    predict_proba,
    select_features,
    structural_score,
    train_random_forest,
)
from smigan.auxdisc.forest import TreeNodes
from smigan.descriptors import SCHEMA_VERSION, compute_descriptors

from oracles import auc_bruteforce


# --- AUC ---------------------------------------------------------------------

def test_auc_perfect_separation():
    assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0


def test_auc_all_ties():
    assert auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5


def test_auc_three_of_four_pairs():
    assert auc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]) == 0.75


def test_auc_degenerate():
    with pytest.raises(DegenerateLabels):
        auc([0.1, 0.2], [1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.integers(0, 1)), min_size=4, max_size=40))
def test_auc_matches_bruteforce_and_antisymmetry(rows):
    scores = [r[0] for r in rows]
    labels = [r[1] for r in rows]
    if len(set(labels)) < 2:
        return
    ours = auc(scores, labels)
    assert ours == pytest.approx(auc_bruteforce(scores, labels), abs=1e-12)
    if len(set(scores)) == len(scores):  # tie-free
        flipped = [1 - y for y in labels]
        assert ours + auc(scores, flipped) == pytest.approx(1.0, abs=1e-12)


# --- feature selection ---------------------------------------------------------

def _separable_data(n=100, n_features=6, seed=0):
    gen = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n // 2)
    values = gen.normal(size=(n, n_features))
    values[:, 0] = labels * 4.0 + gen.normal(scale=0.2, size=n)  # separating
    values[:, 3] = 7.7  # constant
    return values, labels


def test_select_features_finds_separating_feature():
    values, labels = _separable_data()
    top = select_features(values, labels, k=3, folds=5, seed=1)
    assert top[0] == 0


def test_select_features_k_zero():
    values, labels = _separable_data()
    assert select_features(values, labels, k=0) == []


def test_select_features_constant_never_beats_separating():
    values, labels = _separable_data()
    ranked = select_features(values, labels, k=6, folds=5, seed=1)
    assert ranked.index(3) > ranked.index(0)


def test_select_features_deterministic():
    values, labels = _separable_data()
    a = select_features(values, labels, k=4, folds=5, seed=9)
    b = select_features(values, labels, k=4, folds=5, seed=9)
    assert a == b


def test_select_features_single_class():
    values = np.zeros((20, 3))
    with pytest.raises(DegenerateLabels):
        select_features(values, np.zeros(20, dtype=int), k=1)


def test_select_features_insufficient_rows():
    values, labels = _separable_data(n=6)
    with pytest.raises(InsufficientData):
        select_features(values, labels, k=1, folds=5)


# --- random forest --------------------------------------------------------------

def test_forest_single_class_predicts_prob_one():
    values = np.random.default_rng(0).normal(size=(30, 4))
    labels = np.zeros(30, dtype=int)
    model = train_random_forest(values, labels, features=[0, 1], n_trees=5, seed=0)
    proba = predict_proba(model, values[0])
    assert proba[0] == 1.0


def test_forest_separable_holdout_auc():
    gen = np.random.default_rng(3)
    n = 200
    labels = np.repeat([0, 1], n // 2)
    values = gen.normal(size=(n, 5))
    values[:, 0] += labels * 3.0
    values[:, 1] -= labels * 2.0
    perm = gen.permutation(n)
    train_idx, test_idx = perm[:140], perm[140:]
    model = train_random_forest(values[train_idx], labels[train_idx],
                                features=[0, 1, 2, 3, 4], n_trees=100, seed=5)
    proba = predict_proba(model, values[test_idx])
    score = auc(proba[:, 1], labels[test_idx])
    assert score >= 0.95


def test_forest_two_tree_average():
    leaf_a = TreeNodes([-1], [0.0], [-1], [-1], [[1.0, 0.0]])
    leaf_b = TreeNodes([-1], [0.0], [-1], [-1], [[0.0, 1.0]])
    model = RandomForestModel([leaf_a, leaf_b], [0], 2, 2, ["a", "b"], SCHEMA_VERSION, [])
    proba = predict_proba(model, np.array([0.5]))
    assert proba.tolist() == [0.5, 0.5]


def test_forest_probabilities_sum_to_one():
    values, labels = _separable_data(n=60)
    model = train_random_forest(values, labels, features=[0, 1, 2], n_trees=20, seed=2)
    probas = predict_proba(model, values)
    assert np.allclose(probas.sum(axis=1), 1.0)


def test_forest_reproducible_and_roundtrip():
    values, labels = _separable_data(n=60)
    a = train_random_forest(values, labels, features=[0, 1], n_trees=10, seed=4)
    b = train_random_forest(values, labels, features=[0, 1], n_trees=10, seed=4)
    assert a.to_json() == b.to_json()
    back = RandomForestModel.from_json(a.to_json())
    assert np.array_equal(predict_proba(back, values), predict_proba(a, values))


def test_forest_schema_mismatch():
    values, labels = _separable_data(n=40)
    model = train_random_forest(values, labels, features=[0], n_trees=3, seed=0,
                                schema_version="desc-v1")
    with pytest.raises(SchemaMismatch):
        predict_proba(model, values[0], schema_version="desc-v0")


def test_forest_insufficient_data():
    with pytest.raises(InsufficientData):
        train_random_forest(np.zeros((1, 2)), np.zeros(1, dtype=int), [0])


# --- structural rules -------------------------------------------------------------

def test_structural_benzene_carbon_dominant():
    assert structural_score(chem.parse("c1ccccc1")) == 0.5


def test_structural_quinoline_bonus_capped():
    # fused aromatic pair with a nitrogen, no penalties: 1.0 * 1.2 capped
    assert structural_score(chem.parse("c1ccc2ncccc2c1")) == 1.0


def test_structural_macrocycle_carbon_dominant():
    assert structural_score(chem.parse("C1CCCCCCCCCCCCC1")) == pytest.approx(0.25)


def test_structural_heteroatom_excess():
    # N+O+S ratio 4/6 > 0.5, no other rule fires
    assert structural_score(chem.parse("OCC(N)(N)ON")) == pytest.approx(0.5)


def test_structural_halogen_excess():
    # 3 halogens / 5 heavy = 0.6 > 0.35; carbon fraction 0.4 under the cap
    score = structural_score(chem.parse("OC(F)(Cl)CBr"))
    assert score == pytest.approx(0.2)


def test_structural_antiaromatic():
    score = structural_score(chem.parse("C1=CC=C1"))  # 4n pi, all sp2
    assert score == pytest.approx(0.5 * 0.5)  # antiaromatic x carbon-dominant


def test_structural_custom_thresholds():
    rules = StructuralRules(carbon_fraction_max=1.01)
    assert structural_score(chem.parse("c1ccccc1"), rules) == 1.0


def test_structural_permutation_invariant():
    g = chem.parse("c1ccc2ncccc2c1")
    alt = chem.parse(chem.render_smiles(g, list(reversed(range(len(g.atoms))))))
    assert structural_score(alt) == structural_score(g)


# --- combined reward -----------------------------------------------------------------

def _toy_model(p_class1=0.8):
    leaf = TreeNodes([-1], [0.0], [-1], [-1], [[1 - p_class1, p_class1]])
    return RandomForestModel([leaf], [0], 1, 2, ["ether", "amine"], SCHEMA_VERSION,
                             [StructuralRules().to_dict()] * 2)


def test_reward_product_mode():
    model = _toy_model(p_class1=0.8)
    # benzene: structural score 0.5 -> 0.8 * 0.5
    assert auxiliary_reward(model, "c1ccccc1", 1, mode="product") == pytest.approx(0.4)


def test_reward_threshold_mode_above():
    model = _toy_model(p_class1=0.45)
    assert auxiliary_reward(model, "c1ccccc1", 1, mode="threshold", threshold=0.40) == 1.0


def test_reward_threshold_mode_below_falls_back_to_product():
    model = _toy_model(p_class1=0.30)
    r = auxiliary_reward(model, "c1ccccc1", 1, mode="threshold", threshold=0.40)
    assert r == pytest.approx(0.30 * 0.5)


def test_reward_invalid_smiles_zero():
    assert auxiliary_reward(_toy_model(), "C1CC", 1) == 0.0


def test_reward_many_matches_scalar():
    model = _toy_model()
    texts = ["c1ccccc1", "C1CC", "CCO", "c1ccccc1"]
    batch = auxdisc.auxiliary_reward_many(model, texts, 1)
    singles = [auxiliary_reward(model, t, 1) for t in texts]
    assert np.allclose(batch, singles)
