"""Score a small prediction set against expert answers.

Shows the full metric stack: corpus BLEU, macro ROUGE-1, BERTScore over a
toy embedding cache, and the readability triple on the prediction corpus.
"""

import numpy as np

from agriqa.metrics import (
    TokenEmbeddings,
    compute_report,
    readability,
    render_report_text,
)
from agriqa.tokenizer import tokenize

references = [
    "apply urea 25 kilograms potash 15 kilograms micronutrient mixture 5 kilograms per acre",
    "recommended for spray thiodicarb 2 grams per litre of water",
    "recommended watermelon sowing season november - december",
]
predictions = [
    "apply urea 25 kilograms potash 15 kilograms per acre",
    "recommended for spray thiodicarb 2 grams per litre of water",
    "recommended watermelon sowing season december - january",
]

# Toy deterministic embeddings: hash each token into a direction. A real
# run would read a cache exported from a contextual encoder.
def toy_embeddings(text):
    tokens = tokenize(text)
    rng = np.random.default_rng(7)
    basis = {token: rng.normal(size=16) for token in sorted(set(tokens))}
    return TokenEmbeddings(tuple(tokens), np.array([basis[t] for t in tokens]))

pairs = [(toy_embeddings(p), toy_embeddings(r)) for p, r in zip(predictions, references)]
report = compute_report(predictions, references, pairs)
print(render_report_text(report))

print("readability of the expert answers, for comparison:")
expert = readability(" ".join(references))
print(f"  fkgl {expert.fkgl:.3f}   cli {expert.cli:.3f}   dcrs {expert.dcrs:.3f}")
