"""Contrast-set generation toolkit for reading-comprehension QA.

The package turns a question's decomposition into a typed dataflow graph,
applies symbolic rewrites to it, realizes the rewritten graphs back into
natural-language questions, derives answers or answer constraints for them,
and scores model predictions for consistency across each contrast set.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .answers import (
    Answer,
    AnswerType,
    ArithmeticFlip,
    Constraint,
    ConstraintKind,
    DateValue,
    constraints_for,
    numeric_value,
    rule_answer,
)
from .evaluator import Evaluation, EvaluatorConfig, evaluate
from .metrics import (
    ContrastGroup,
    GroupMember,
    Report,
    build_report,
    consistency,
    constraint_satisfied,
    score_prediction,
    token_f1,
)
from .perturb import (
    Comparator,
    ComparisonCondition,
    PerturbationKind,
    RewriteCandidate,
    perturb_all,
)
from .pipeline import (
    AnswerMethod,
    AugmentConfig,
    GeneratedRecord,
    GenerationLog,
    augment,
    build_groups,
    generate,
    group_rows,
    rows_to_groups,
    sample_for_augmentation,
)
from .qdmr import (
    Decomposition,
    Operator,
    OperatorKind,
    Step,
    classify_operator,
    parse_decomposition,
    renumber,
    serialize,
    validate,
)
from .realize import RealizationMethod, RealizationResult, realize_backend, realize_pattern

__all__ = [
    "Answer",
    "AnswerMethod",
    "AnswerType",
    "ArithmeticFlip",
    "AugmentConfig",
    "Comparator",
    "ComparisonCondition",
    "Constraint",
    "ConstraintKind",
    "ContrastGroup",
    "DateValue",
    "Decomposition",
    "Evaluation",
    "EvaluatorConfig",
    "GeneratedRecord",
    "GenerationLog",
    "GroupMember",
    "Operator",
    "OperatorKind",
    "PerturbationKind",
    "RealizationMethod",
    "RealizationResult",
    "Report",
    "RewriteCandidate",
    "Step",
    "augment",
    "build_groups",
    "build_report",
    "classify_operator",
    "consistency",
    "constraint_satisfied",
    "constraints_for",
    "evaluate",
    "generate",
    "group_rows",
    "numeric_value",
    "parse_decomposition",
    "perturb_all",
    "realize_backend",
    "realize_pattern",
    "renumber",
    "rows_to_groups",
    "rule_answer",
    "sample_for_augmentation",
    "score_prediction",
    "serialize",
    "token_f1",
    "validate",
    "__version__",
]
