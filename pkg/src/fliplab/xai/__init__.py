"""Model-agnostic explanations of clean and poisoned classifiers.

Four views: global permutation importance, a local linear surrogate of one
prediction, sampled Shapley attributions, and a global surrogate decision
tree with extracted rules. All explainers treat the model as a black box
through predict / predict_proba, are deterministic given their seed, and
evaluate repeats from pre-split seed streams so results never depend on
evaluation order.
"""

from .explanations import ImportanceReport, LocalExplanation, Rule, SurrogateTree
from .importance import permutation_importance
from .lime import lime_explain
from .shapley import shap_values
from .surrogate import surrogate_tree, extract_rules

__all__ = [
    "ImportanceReport",
    "LocalExplanation",
    "Rule",
    "SurrogateTree",
    "permutation_importance",
    "lime_explain",
    "shap_values",
    "surrogate_tree",
    "extract_rules",
]
