"""fliplab: a desk-scale lab for label-flipping data poisoning on EEG band-power
risk classifiers, with model-agnostic explanations.

The library is organized around one pipeline: load or synthesize band-power
data (`fliplab.data`), flip training labels under a configured attack scenario
(`fliplab.poison`), train one of six classifier families (`fliplab.classifiers`),
score on the untouched test split (`fliplab.metrics`), and explain the result
(`fliplab.xai`). `fliplab.harness` sweeps the model x scenario x rate grid and
renders tables and charts; the `fliplab` CLI wraps each stage.
"""

__version__ = "0.1.0"

from . import data, poison, metrics, classifiers, xai, harness  # noqa: F401
