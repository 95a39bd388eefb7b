"""tabpilot: human-in-the-loop AutoML for tabular data.

Subpackages cover the full workflow: dataset ingestion and profiling
(:mod:`tabpilot.data_model`), problem specification
(:mod:`tabpilot.problem_spec`), the primitive library
(:mod:`tabpilot.primitives`), pipeline assembly (:mod:`tabpilot.pipeline`),
evaluation (:mod:`tabpilot.evaluation`), budgeted search
(:mod:`tabpilot.search`), explanations (:mod:`tabpilot.explain`), dataset
augmentation (:mod:`tabpilot.augment`), and the HTTP/CLI service layer
(:mod:`tabpilot.service`).
"""

__version__ = "0.1.0"
