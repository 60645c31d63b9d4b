"""Pretrained auxiliary discriminator: feature screening, random forest,
structural rules, and the combined reward."""

from smigan.auxdisc.logistic import DegenerateLabels, InsufficientData, auc, select_features
from smigan.auxdisc.forest import (
    RandomForestModel,
    SchemaMismatch,
    TreeNodes,
    predict_proba,
    train_random_forest,
)
from smigan.auxdisc.rules import StructuralRules, structural_score
from smigan.auxdisc.reward import (
    auxiliary_reward,
    auxiliary_reward_many,
    class_rules,
    classify,
)

__all__ = [
    "DegenerateLabels", "InsufficientData", "RandomForestModel",
    "SchemaMismatch", "StructuralRules", "TreeNodes", "auc",
    "auxiliary_reward", "auxiliary_reward_many", "class_rules", "classify",
    "predict_proba", "select_features", "structural_score",
    "train_random_forest",
]
