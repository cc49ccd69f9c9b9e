"""Greedy wrapper feature selection with a dropping forward-backward scheme.

Core pieces: least-squares subset refits (:mod:`dropselect.linalg`), the Cp
and trace criteria (:mod:`dropselect.criteria`), the five selectors
(:mod:`dropselect.selectors`), synthetic-data benchmarks
(:mod:`dropselect.datagen`), the classification evaluation pipeline
(:mod:`dropselect.evaluation`), and a FastAPI service plus thin CLI.
"""

__version__ = "0.1.0"

from .dataset import Dataset  # noqa: F401
from .selectors import (  # noqa: F401
    SelectionConfig,
    SelectionReport,
    backward_eliminate,
    dropping_fb_select,
    forward_backward_select,
    forward_select,
    stepwise_select,
)
