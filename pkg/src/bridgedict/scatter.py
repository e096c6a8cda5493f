"""Topic scatterplot pipeline: embed sampled texts, project to 2D, cluster.

The default embedder is a feature-hashed tf-idf over unigrams and bigrams
(signed hashing, L2-normalized, idf over the input batch). Projection is
exact PCA with a fixed sign convention; clustering is plain DBSCAN on
Euclidean 2D distance. Everything is deterministic, so payloads are
reproducible byte-for-byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .corpus import SENTINELS, normalize, tokenize
from .index import InvertedIndex
from .rag import SampleSet, sample_matches
from .stopwords import STOPWORDS

DEFAULT_DIM = 256
DEFAULT_EPS = 0.15
DEFAULT_MIN_PTS = 4
EMBEDDER_ID = "hashed-tfidf-v1"


class ScatterError(ValueError):
    """Not enough data to draw a scatterplot."""


@dataclass(frozen=True)
class ClusterParams:
    eps: float = DEFAULT_EPS
    min_pts: int = DEFAULT_MIN_PTS


@dataclass
class ScatterPayload:
    term: str
    x: list[float]
    y: list[float]
    label: list[int]
    community: list[str]
    doc_id: list[str]
    text: list[str]
    params: dict


def _features(text: str) -> list[str]:
    toks = [
        t
        for t in tokenize(normalize(text))
        if t not in STOPWORDS and t not in SENTINELS
    ]
    feats = list(toks)
    feats.extend(f"{a} {b}" for a, b in zip(toks, toks[1:]))
    return feats


def _hash_feature(feature: str) -> tuple[int, float]:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    h = int.from_bytes(digest, "big")
    sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
    return h % (1 << 63), sign


def embed(texts: list[str], dim: int = DEFAULT_DIM) -> np.ndarray:
    """One L2-normalized hashed tf-idf vector per text (idf over this batch).

    All-stopword texts embed to the zero vector.
    """
    if not texts:
        raise ValueError("cannot embed an empty text list")
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    feature_lists = [_features(t) for t in texts]
    df: dict[str, int] = {}
    for feats in feature_lists:
        for feat in set(feats):
            df[feat] = df.get(feat, 0) + 1
    n = len(texts)
    idf = {feat: np.log((1.0 + n) / (1.0 + count)) + 1.0 for feat, count in df.items()}
    out = np.zeros((n, dim), dtype=np.float64)
    for row, feats in enumerate(feature_lists):
        counts: dict[str, int] = {}
        for feat in feats:
            counts[feat] = counts.get(feat, 0) + 1
        for feat, tf in counts.items():
            bucket, sign = _hash_feature(feat)
            out[row, bucket % dim] += sign * tf * idf[feat]
        norm = np.linalg.norm(out[row])
        if norm > 0:
            out[row] /= norm
    return out


def project_2d(vectors: np.ndarray) -> np.ndarray:
    """Exact PCA to the top-2 principal directions, order-preserving.

    Sign convention: each component's largest-magnitude loading is positive.
    Degenerate input (all points identical) projects to the origin.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 3:
        raise ValueError("projection needs at least 3 vectors")
    centered = vectors - vectors.mean(axis=0)
    if not np.any(np.abs(centered) > 1e-15):
        return np.zeros((vectors.shape[0], 2), dtype=np.float64)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2].copy()
    if components.shape[0] < 2:
        components = np.vstack([components, np.zeros_like(components[0])])
    for i in range(2):
        loading = components[i]
        j = int(np.argmax(np.abs(loading)))
        if loading[j] < 0:
            components[i] = -loading
    return centered @ components.T


def rescale_unit_extent(points: np.ndarray) -> np.ndarray:
    """Uniformly rescale a 2D cloud into [-1, 1]^2 (aspect ratio preserved)."""
    points = np.asarray(points, dtype=np.float64)
    mins = points.min(axis=0)
    maxs = points.max(axis=0)
    center = (mins + maxs) / 2.0
    half_extent = float(np.max(maxs - mins)) / 2.0
    if half_extent == 0.0:
        return np.zeros_like(points)
    return (points - center) / half_extent


def cluster(points: np.ndarray, eps: float, min_pts: int) -> list[int]:
    """DBSCAN on Euclidean 2D distance with deterministic scan order.

    A point is core iff it has >= min_pts neighbors within eps (inclusive,
    counting itself). Clusters are grown from core points in index order;
    border points stick with the first cluster that reaches them. Noise is
    -1; cluster ids are renumbered 0..k-1 by first appearance.
    """
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n == 0:
        return []
    diffs = pts[:, None, :] - pts[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diffs, diffs)
    eps2 = eps * eps
    neighbor_mask = dist2 <= eps2
    neighbors = [np.flatnonzero(neighbor_mask[i]).tolist() for i in range(n)]
    core = [len(neighbors[i]) >= min_pts for i in range(n)]

    labels: list[int | None] = [None] * n
    cluster_id = 0
    for i in range(n):
        if labels[i] is not None or not core[i]:
            continue
        labels[i] = cluster_id
        frontier = [i]
        while frontier:
            current = frontier.pop(0)
            for j in neighbors[current]:
                if labels[j] is None:
                    labels[j] = cluster_id
                    if core[j]:
                        frontier.append(j)
        cluster_id += 1

    final = [lbl if lbl is not None else -1 for lbl in labels]
    remap: dict[int, int] = {}
    for lbl in final:
        if lbl != -1 and lbl not in remap:
            remap[lbl] = len(remap)
    return [remap[lbl] if lbl != -1 else -1 for lbl in final]


def build_scatter(
    index: InvertedIndex,
    term: str,
    seed: int,
    cap: int = 50,
    params: ClusterParams | None = None,
    dim: int = DEFAULT_DIM,
    samples: tuple[SampleSet, SampleSet] | None = None,
) -> ScatterPayload:
    """Joint scatter payload for both communities of one term.

    Reuses the same per-community SampleSets as generation (pass them in to
    guarantee it), embeds the union in one batch, projects jointly, rescales
    to unit extent, and clusters jointly.
    """
    params = params or ClusterParams()
    if samples is None:
        samples = tuple(
            sample_matches(index, term, label, cap, seed) for label in index.labels
        )  # type: ignore[assignment]
    texts: list[str] = []
    communities: list[str] = []
    doc_ids: list[str] = []
    for sample_set in samples:
        texts.extend(sample_set.texts)
        communities.extend([sample_set.community] * len(sample_set))
        doc_ids.extend(sample_set.doc_ids)
    if len(texts) < 3:
        raise ScatterError("insufficient data for scatterplot")
    vectors = embed(texts, dim=dim)
    coords = rescale_unit_extent(project_2d(vectors))
    labels = cluster(coords, params.eps, params.min_pts)
    surface = samples[0].term
    return ScatterPayload(
        term=surface,
        x=[float(v) for v in coords[:, 0]],
        y=[float(v) for v in coords[:, 1]],
        label=labels,
        community=communities,
        doc_id=doc_ids,
        text=texts,
        params={
            "eps": params.eps,
            "min_pts": params.min_pts,
            "seed": seed,
            "cap": cap,
            "dim": dim,
            "embedder": EMBEDDER_ID,
        },
    )
