"""Context-evidence fusion for uncertain symbol/text labeling.

Submodules
----------
evidence
    Belief-function arithmetic: frames, mass functions, combination.
possibility
    Possibility distributions and consonant mass functions.
fusion
    Product frames and probability/plausibility fusion.
graph
    Connection graphs and the max-min solution-subgraph value.
engine
    Joint labeling enumeration, plausibilities and posteriors.
cli
    JSON ingestion, rule evaluation and the command-line tool.

The graph optimizer uses a compiled kernel when the extension is built and a
pure-Python kernel otherwise; ``kernel_backend()`` reports which one is
active.
"""

from . import cli, engine, evidence, fusion, graph, possibility
from .graph import KERNEL_BACKEND

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active bottleneck kernel: 'compiled' or 'python'."""
    return KERNEL_BACKEND
