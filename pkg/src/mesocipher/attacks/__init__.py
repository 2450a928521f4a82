from .core import AttackConfig, AttackOutcome, verify_trial_key
from .english import english_score, english_scores
from .grover import GroverEstimate, grover_estimate, grover_success_by_rotation, grover_success_prob
from .pruning import pruning_search
from .search import exhaustive_search, multi_window_attack

__all__ = [
    "AttackConfig", "AttackOutcome", "GroverEstimate", "english_score", "english_scores",
    "exhaustive_search", "grover_estimate", "grover_success_by_rotation", "grover_success_prob",
    "multi_window_attack", "pruning_search", "verify_trial_key",
]
