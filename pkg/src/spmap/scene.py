"""Scene model: obstacle rings, source point, bounding box, JSON round trip."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .config import Config
from .errors import InvalidScene
from . import geometry as G
from .geometry import Point


@dataclass
class Scene:
    """Pairwise-disjoint simple polygonal obstacles plus a source point.

    Rings are stored counterclockwise.  The working bounding box inflates the
    geometry bounds by 1.5x the scene diameter on each side, so every map
    face stays bounded without the box ever binding a shortest path.
    """

    obstacles: list[list[Point]]
    source: Point
    explicit_bbox: Optional[tuple[float, float, float, float]] = None
    config: Config = field(default_factory=Config)

    def __post_init__(self) -> None:
        self.obstacles = [G.validate_ring(r) for r in self.obstacles]
        self.source = (float(self.source[0]), float(self.source[1]))
        self._validate_disjoint()
        if self.config.perturb:
            self._apply_perturbation()
        if self._strictly_inside_any(self.source):
            raise InvalidScene("source lies inside an obstacle")

    # -- validation --------------------------------------------------------

    def _validate_disjoint(self) -> None:
        rings = self.obstacles
        for i in range(len(rings)):
            for j in range(i + 1, len(rings)):
                a, b = rings[i], rings[j]
                for k in range(len(a)):
                    for m in range(len(b)):
                        if G.segments_properly_cross(a[k], a[(k + 1) % len(a)],
                                                     b[m], b[(m + 1) % len(b)]):
                            raise InvalidScene(f"obstacles {i} and {j} intersect")
                if G.point_in_ring(b[0], a) or G.point_in_ring(a[0], b):
                    raise InvalidScene(f"obstacle {i} and {j} nest")

    def _apply_perturbation(self) -> None:
        mag = self.config.perturb_magnitude * self.diameter
        seed = self.config.perturb_seed

        def jitter(p: Point, tag: bytes) -> Point:
            h = hashlib.sha256(tag + repr(p).encode() + str(seed).encode()).digest()
            dx = (int.from_bytes(h[:8], "big") / 2**64 - 0.5) * 2 * mag
            dy = (int.from_bytes(h[8:16], "big") / 2**64 - 0.5) * 2 * mag
            return (p[0] + dx, p[1] + dy)

        self.obstacles = [[jitter(p, b"v%d" % i) for p in ring]
                          for i, ring in enumerate(self.obstacles)]

    # -- metric helpers ----------------------------------------------------

    @property
    def h(self) -> int:
        return len(self.obstacles)

    @property
    def n(self) -> int:
        return sum(len(r) for r in self.obstacles)

    @property
    def geometry_bbox(self) -> tuple[float, float, float, float]:
        pts = [self.source]
        for r in self.obstacles:
            pts.extend(r)
        return G.bbox_of(pts)

    @property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.geometry_bbox
        return max(math.hypot(x1 - x0, y1 - y0), 1e-9)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        if self.explicit_bbox is not None:
            return self.explicit_bbox
        x0, y0, x1, y1 = self.geometry_bbox
        m = 1.5 * self.diameter
        return (x0 - m, y0 - m, x1 + m, y1 + m)

    def box_ring(self) -> list[Point]:
        """Bounding box as a clockwise ring, i.e. free space to its right."""
        x0, y0, x1, y1 = self.bbox
        return [(x0, y0), (x0, y1), (x1, y1), (x1, y0)]

    def free_area(self) -> float:
        x0, y0, x1, y1 = self.bbox
        area = (x1 - x0) * (y1 - y0)
        for r in self.obstacles:
            area -= G.polygon_area(r)
        return area

    def eps(self) -> float:
        return self.config.scaled_eps(self.diameter)

    # -- free-space predicates ----------------------------------------------

    def _strictly_inside_any(self, p: Point) -> bool:
        tol = 1e-12 * self.diameter
        for r in self.obstacles:
            if G.point_in_ring(p, r) and not G.point_on_ring(p, r, tol):
                return True
        return False

    def in_free_space(self, p: Point, *, tol: float = 0.0) -> bool:
        """Closed free space: obstacle boundaries count as free."""
        x0, y0, x1, y1 = self.bbox
        if not (x0 - tol <= p[0] <= x1 + tol and y0 - tol <= p[1] <= y1 + tol):
            return False
        for r in self.obstacles:
            if G.point_on_ring(p, r, max(tol, 1e-12 * self.diameter)):
                return True
            if G.point_in_ring(p, r):
                return False
        return True

    def clearance(self, p: Point) -> float:
        """Distance from p to the nearest obstacle edge (inf when h=0)."""
        best = math.inf
        for r in self.obstacles:
            for i in range(len(r)):
                best = min(best, G.seg_point_distance(r[i], r[(i + 1) % len(r)], p))
        return best

    def all_edges(self) -> list[tuple[Point, Point]]:
        out = []
        for r in self.obstacles:
            for i in range(len(r)):
                out.append((r[i], r[(i + 1) % len(r)]))
        return out

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        d: dict = {
            "obstacles": [[list(p) for p in r] for r in self.obstacles],
            "source": list(self.source),
        }
        if self.explicit_bbox is not None:
            d["bbox"] = list(self.explicit_bbox)
        cfg = self.config
        d["config"] = {
            "eps_geo": cfg.eps_geo,
            "perturb": cfg.perturb,
            "perturb_seed": cfg.perturb_seed,
        }
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @staticmethod
    def from_json_dict(d: dict) -> "Scene":
        if not isinstance(d, dict) or "obstacles" not in d or "source" not in d:
            raise InvalidScene("scene file needs 'obstacles' and 'source'")
        cfg = Config()
        raw_cfg = d.get("config") or {}
        if "eps_geo" in raw_cfg:
            cfg.eps_geo = float(raw_cfg["eps_geo"])
        if "perturb" in raw_cfg:
            cfg.perturb = bool(raw_cfg["perturb"])
        if "perturb_seed" in raw_cfg:
            cfg.perturb_seed = int(raw_cfg["perturb_seed"])
        bbox = tuple(d["bbox"]) if "bbox" in d else None
        try:
            return Scene([[(float(x), float(y)) for x, y in ring]
                          for ring in d["obstacles"]],
                         (float(d["source"][0]), float(d["source"][1])),
                         explicit_bbox=bbox, config=cfg)
        except (TypeError, ValueError) as exc:
            raise InvalidScene(f"malformed scene data: {exc}") from exc

    @staticmethod
    def loads(text: str) -> "Scene":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidScene(f"not valid JSON: {exc}") from exc
        return Scene.from_json_dict(data)

    @staticmethod
    def load(path: str) -> "Scene":
        with open(path, "r", encoding="utf-8") as fh:
            return Scene.loads(fh.read())

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())


def ray_shoot(scene: Scene, origin: Point, direction: Point
              ) -> Optional[tuple[int, int, float]]:
    """First obstacle edge hit by an axis-parallel ray.

    Returns (ring index, edge index, t) with the hit at origin + t*direction,
    or None when the ray escapes to the box unobstructed.  The box itself is
    not reported.  Direction must be axis-parallel.
    """
    dx, dy = direction
    if not (dx == 0.0) ^ (dy == 0.0):
        raise G.GeometryError("ray_shoot direction must be axis-parallel")
    best: Optional[tuple[int, int, float]] = None
    for ri, ring in enumerate(scene.obstacles):
        nv = len(ring)
        for ei in range(nv):
            t = G.ray_segment_intersection(origin, direction, ring[ei],
                                           ring[(ei + 1) % nv])
            if t is not None and t > 1e-12 * scene.diameter:
                if best is None or t < best[2]:
                    best = (ri, ei, t)
    return best
