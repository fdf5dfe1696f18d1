"""Tooling for farmer-helpline query corpora.

Subpackages cover the full lifecycle of a helpline QA corpus: CSV ingestion
and stratified splitting (:mod:`agriqa.corpus`), deterministic transcript
normalization (:mod:`agriqa.normalize`), generation-quality and readability
metrics (:mod:`agriqa.metrics`), metadata ablations (:mod:`agriqa.evalharness`),
provider gateway clients (:mod:`agriqa.modelgw`), and the HTTP query service
(:mod:`agriqa.service`).
"""

__version__ = "0.1.0"
