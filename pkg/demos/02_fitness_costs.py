"""What the three fitness costs actually measure.

Scores a handful of hand-built 2-D embeddings of the Wine data under each
cost. Identity-like embeddings score near zero, informative projections
score low, and uninformative feature pairs score high; nrmse additionally
punishes distance distortion rather than just reordering.
"""

import numpy as np

from gp4nldr import build_neighbor_table, gpmal2_cost, gpmal_cost, nrmse_cost, wine_dataset
from gp4nldr.fitness import DEFAULT_NEIGHBORS

dataset = wine_dataset()
X = dataset.scaled
names = list(dataset.feature_names)

centered = X - X.mean(axis=0)
_, _, vt = np.linalg.svd(centered, full_matrices=False)

embeddings = {
    "all 13 dims (identity)": X,
    "PCA, first 2 components": centered @ vt[:2].T,
    "flavanoids + proline": X[:, [names.index("flavanoids"), names.index("proline")]],
    "hue + proanthocyanins": X[:, [names.index("hue"), names.index("proanthocyanins")]],
    "random noise": np.random.default_rng(0).normal(size=(X.shape[0], 2)),
}

table = build_neighbor_table(X, min(X.shape[0] - 1, DEFAULT_NEIGHBORS))

print(f"{'embedding':28s} {'gpmal':>8s} {'gpmal2':>8s} {'nrmse':>8s}")
for label, embedding in embeddings.items():
    print(
        f"{label:28s} "
        f"{gpmal_cost(embedding, table):8.4f} "
        f"{gpmal2_cost(embedding, X):8.4f} "
        f"{nrmse_cost(embedding, X):8.4f}"
    )

print("\nlower is better; 0 means structure is preserved perfectly.")
