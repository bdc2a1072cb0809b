"""Built-in datasets used by the bundled example runs, demos and tests.

Wine is the real UCI chemical-analysis dataset (13 features, 178
instances, 3 cultivars), taken from scikit-learn's bundled copy.

The Dermatology and COIL20 builders generate seeded synthetic stand-ins
with the shape of the corresponding public datasets (34 ordinal clinical /
histopathological features over 6 diagnoses; 20 objects x 72 turntable
angles of 32x32 gray-scale pixels). The originals are not redistributable
with this package, so the stand-ins reproduce their dimensions, class
structure and feature naming rather than their actual measurements.
"""

from __future__ import annotations

import numpy as np
from sklearn.datasets import load_wine

from .data import Dataset, assign_feature_names

__all__ = ["BUILTIN_DATASETS", "coil20_dataset", "dermatology_dataset", "wine_dataset"]


def wine_dataset() -> Dataset:
    """UCI Wine: 178 instances, 13 features, 3 cultivar classes."""
    bundle = load_wine()
    labels = tuple(f"cultivar_{t + 1}" for t in bundle.target)
    return Dataset(
        name="Wine",
        feature_names=tuple(bundle.feature_names),
        rows=np.asarray(bundle.data, dtype=float),
        labels=labels,
    )


_DERMATOLOGY_FEATURES = (
    "erythema",
    "scaling",
    "definite_borders",
    "itching",
    "koebner_phenomenon",
    "polygonal_papules",
    "follicular_papules",
    "oral_mucosal_involvement",
    "knee_and_elbow_involvement",
    "scalp_involvement",
    "family_history",
    "melanin_incontinence",
    "eosinophils_in_the_infiltrate",
    "pnl_infiltrate",
    "fibrosis_of_the_papillary_dermis",
    "exocytosis",
    "acanthosis",
    "hyperkeratosis",
    "parakeratosis",
    "clubbing_of_the_rete_ridges",
    "elongation_of_the_rete_ridges",
    "thinning_of_the_suprapapillary_epidermis",
    "spongiform_pustule",
    "munro_microabcess",
    "focal_hypergranulosis",
    "disappearance_of_the_granular_layer",
    "vacuolisation_and_damage_of_basal_layer",
    "spongiosis",
    "saw_tooth_appearance_of_retes",
    "follicular_horn_plug",
    "perifollicular_parakeratosis",
    "inflammatory_mononuclear_infiltrate",
    "band_like_infiltrate",
    "age",
)

_DERMATOLOGY_CLASSES = (
    ("psoriasis", 109),
    ("seborrheic_dermatitis", 60),
    ("lichen_planus", 71),
    ("pityriasis_rosea", 48),
    ("chronic_dermatitis", 50),
    ("pityriasis_rubra_pilaris", 20),
)


def dermatology_dataset(seed: int = 20240) -> Dataset:
    """Synthetic stand-in: 358 instances, 34 features, 6 skin-disease classes.

    Ordinal features take values 0..3 around a per-class prototype,
    family_history is binary, and age spans 10..75, so each diagnosis forms
    a separable cluster the way the real clinical data does.
    """
    rng = np.random.default_rng(seed)
    rows = []
    labels = []
    age_index = _DERMATOLOGY_FEATURES.index("age")
    family_index = _DERMATOLOGY_FEATURES.index("family_history")
    for class_name, count in _DERMATOLOGY_CLASSES:
        prototype = rng.uniform(0.0, 3.0, size=len(_DERMATOLOGY_FEATURES))
        prototype[family_index] = rng.integers(0, 2)
        mean_age = rng.uniform(20.0, 60.0)
        for _ in range(count):
            row = np.clip(np.rint(prototype + rng.normal(0.0, 0.7, prototype.shape)), 0, 3)
            row[family_index] = 1.0 if rng.random() < prototype[family_index] * 0.5 + 0.25 else 0.0
            row[age_index] = np.clip(np.rint(mean_age + rng.normal(0.0, 12.0)), 10, 75)
            rows.append(row)
            labels.append(class_name)
    return Dataset(
        name="Dermatology",
        feature_names=_DERMATOLOGY_FEATURES,
        rows=np.array(rows),
        labels=tuple(labels),
    )


def coil20_dataset(seed: int = 20241, instances_per_object: int = 72) -> Dataset:
    """Synthetic stand-in: 20 objects x 72 rotation angles of 32x32 pixels.

    Each object is a pair of smooth random 1024-pixel patterns blended by
    the turntable angle, giving every class a one-dimensional ring manifold
    in pixel space like the photographed originals.
    """
    rng = np.random.default_rng(seed)
    side = 32
    num_pixels = side * side
    rows = []
    labels = []
    for obj in range(1, 21):
        base = _smooth_image(rng, side)
        alt = _smooth_image(rng, side)
        offset = rng.uniform(0, 2 * np.pi)
        for i in range(instances_per_object):
            theta = 2 * np.pi * i / instances_per_object + offset
            image = base * np.cos(theta) + alt * np.sin(theta)
            image = image + rng.normal(0.0, 0.02, num_pixels)
            rows.append(np.clip((image + 1.0) * 127.5, 0, 255))
            labels.append(f"obj{obj:02d}")
    return Dataset(
        name="COIL20",
        feature_names=tuple(assign_feature_names(num_pixels)),
        rows=np.array(rows),
        labels=tuple(labels),
    )


def _smooth_image(rng: np.random.Generator, side: int) -> np.ndarray:
    """Random pixel field smoothed with a box blur, flattened and normalized."""
    img = rng.normal(0.0, 1.0, (side, side))
    kernel = 5
    padded = np.pad(img, kernel // 2, mode="wrap")
    out = np.zeros_like(img)
    for dy in range(kernel):
        for dx in range(kernel):
            out += padded[dy : dy + side, dx : dx + side]
    out /= kernel * kernel
    out -= out.mean()
    peak = np.abs(out).max()
    if peak > 0:
        out /= peak
    return out.ravel()


BUILTIN_DATASETS = {
    "wine": wine_dataset,
    "dermatology": dermatology_dataset,
    "coil20": coil20_dataset,
}
