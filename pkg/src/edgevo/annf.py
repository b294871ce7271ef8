"""Exact Euclidean nearest-neighbour fields over semi-dense regions.

The field stores, for every pixel of the image, the identity (u, v) of the
closest region pixel under the Euclidean metric.  Distances are exact: the
construction runs a two-phase lower-envelope distance transform where the
first phase scans rows and the second sweeps columns, carrying the seed
identity through both.  Ties are broken toward the smallest row-major seed
index (smallest v, then smallest u), which phase order makes automatic.

A scalar distance field with bilinear sampling is provided for the
gradient-descent registration baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .image import SemiDenseRegion


@dataclass(eq=False)
class NearestNeighbourField:
    """Per-pixel (u, v) identity of the closest region pixel.

    ``nn`` has shape (height, width, 2) with channel 0 = u, channel 1 = v.
    ``lookups`` counts batch lookups; registration tests use it to verify
    neighbours are fetched exactly once per solver iteration.
    """

    width: int
    height: int
    nn: np.ndarray
    seed_count: int
    lookups: int = field(default=0)

    def distances(self) -> np.ndarray:
        """Euclidean distance layer derived from the stored identities."""
        v, u = np.mgrid[0 : self.height, 0 : self.width]
        return np.hypot(u - self.nn[:, :, 0], v - self.nn[:, :, 1])


@dataclass(eq=False)
class DistanceField:
    """Per-pixel Euclidean distance to the closest region pixel."""

    width: int
    height: int
    dist: np.ndarray


@njit(cache=True)
def _annf_kernel(mask, nn_u, nn_v):  # pragma: no cover - exercised via wrapper
    h, w = mask.shape
    inf = np.inf

    # Phase 1: per row, squared distance to the nearest seed column and that
    # column's index; ties resolve to the smaller column.
    hdist2 = np.empty((h, w), dtype=np.float64)
    hcol = np.empty((h, w), dtype=np.int32)
    for v in range(h):
        last = -1
        for u in range(w):
            if mask[v, u]:
                last = u
            if last >= 0:
                d = u - last
                hdist2[v, u] = d * d
                hcol[v, u] = last
            else:
                hdist2[v, u] = inf
                hcol[v, u] = -1
        nxt = -1
        for u in range(w - 1, -1, -1):
            if mask[v, u]:
                nxt = u
            if nxt >= 0:
                d = nxt - u
                d2 = float(d * d)
                if d2 < hdist2[v, u]:
                    hdist2[v, u] = d2
                    hcol[v, u] = nxt

    # Phase 2: per column, lower envelope of the parabolas
    # f_v'(v) = (v - v')^2 + hdist2[v', u] over rows v' that contain seeds.
    vbuf = np.empty(h, dtype=np.int64)
    zbuf = np.empty(h + 1, dtype=np.float64)
    for u in range(w):
        k = -1
        for q in range(h):
            fq = hdist2[q, u]
            if fq == inf:
                continue
            if k < 0:
                k = 0
                vbuf[0] = q
                zbuf[0] = -inf
                zbuf[1] = inf
                continue
            while True:
                p = vbuf[k]
                s = (fq + q * q - hdist2[p, u] - p * p) / (2.0 * (q - p))
                if s > zbuf[k]:
                    break
                k -= 1
            k += 1
            vbuf[k] = q
            zbuf[k] = s
            zbuf[k + 1] = inf
        k = 0
        for v in range(h):
            while zbuf[k + 1] < v:
                k += 1
            p = vbuf[k]
            nn_u[v, u] = hcol[p, u]
            nn_v[v, u] = p


def build_annf(region: SemiDenseRegion, width: int, height: int) -> NearestNeighbourField:
    """Exact nearest-neighbour field of a semi-dense region."""
    if len(region) == 0:
        raise ValueError("cannot build a nearest-neighbour field from an empty region")
    u = region.pixels[:, 0]
    v = region.pixels[:, 1]
    if u.min() < 0 or v.min() < 0 or u.max() >= width or v.max() >= height:
        raise ValueError("region pixels fall outside the requested field size")
    mask = np.zeros((height, width), dtype=np.bool_)
    mask[v, u] = True
    nn_u = np.empty((height, width), dtype=np.int32)
    nn_v = np.empty((height, width), dtype=np.int32)
    _annf_kernel(mask, nn_u, nn_v)
    return NearestNeighbourField(
        width=width,
        height=height,
        nn=np.stack([nn_u, nn_v], axis=2),
        seed_count=len(region),
    )


def lookup_nn(field: NearestNeighbourField, p: np.ndarray) -> np.ndarray:
    """Neighbour identity at a real-valued position (nearest-pixel lookup)."""
    return lookup_nn_batch(field, np.asarray(p, dtype=np.float64)[None, :])[0]


def lookup_nn_batch(field: NearestNeighbourField, pts: np.ndarray) -> np.ndarray:
    """Neighbour identities for (N, 2) real positions in one indexed gather."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.size and (
        pts[:, 0].min() < 0
        or pts[:, 1].min() < 0
        or pts[:, 0].max() > field.width - 1
        or pts[:, 1].max() > field.height - 1
    ):
        raise ValueError("lookup position outside the field")
    iu = np.rint(pts[:, 0]).astype(np.intp)
    iv = np.rint(pts[:, 1]).astype(np.intp)
    field.lookups += 1
    return field.nn[iv, iu]


def build_distance_field(region: SemiDenseRegion, width: int, height: int) -> DistanceField:
    """Euclidean distance field of a region (zero exactly on region pixels)."""
    annf = build_annf(region, width, height)
    return DistanceField(width=width, height=height, dist=annf.distances())


def _bilinear_setup(field: DistanceField, pts: np.ndarray):
    pts = np.asarray(pts, dtype=np.float64)
    if pts.size and (
        pts[:, 0].min() < 0
        or pts[:, 1].min() < 0
        or pts[:, 0].max() > field.width - 1
        or pts[:, 1].max() > field.height - 1
    ):
        raise ValueError("sample position outside the field")
    x0 = np.minimum(np.floor(pts[:, 0]), field.width - 2).astype(np.intp)
    y0 = np.minimum(np.floor(pts[:, 1]), field.height - 2).astype(np.intp)
    fx = pts[:, 0] - x0
    fy = pts[:, 1] - y0
    d = field.dist
    return (
        d[y0, x0],
        d[y0, x0 + 1],
        d[y0 + 1, x0],
        d[y0 + 1, x0 + 1],
        fx,
        fy,
    )


def sample_bilinear(field: DistanceField, p: np.ndarray) -> float:
    """Bilinearly interpolated distance at a real-valued position."""
    return float(sample_bilinear_batch(field, np.asarray(p, dtype=np.float64)[None, :])[0])


def sample_bilinear_batch(field: DistanceField, pts: np.ndarray) -> np.ndarray:
    d00, d10, d01, d11, fx, fy = _bilinear_setup(field, pts)
    top = d00 * (1.0 - fx) + d10 * fx
    bot = d01 * (1.0 - fx) + d11 * fx
    return top * (1.0 - fy) + bot * fy


def sample_gradient_batch(field: DistanceField, pts: np.ndarray) -> np.ndarray:
    """Spatial gradient (d/du, d/dv) of the bilinear surface at (N, 2) points."""
    d00, d10, d01, d11, fx, fy = _bilinear_setup(field, pts)
    gu = (d10 - d00) * (1.0 - fy) + (d11 - d01) * fy
    gv = (d01 - d00) * (1.0 - fx) + (d11 - d10) * fx
    return np.stack([gu, gv], axis=1)


def distance_field_to_u16(field: DistanceField, scale: float = 256.0) -> np.ndarray:
    """Quantize distances for the 16-bit PNG debug dump."""
    return np.clip(field.dist * scale, 0, 65535).astype(np.uint16)
