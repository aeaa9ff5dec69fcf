"""Tunable numeric and audit knobs.

All tolerances are relative: they get scaled by the scene diameter before use.
Audit constants bound combinatorial sizes; exceeding one is treated as a bug,
not as something to clamp.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class AuditConstants:
    max_edges_per_h: int = 2500         # transparent edge count <= this * h;
                                        # square-only cells cost a constant
                                        # factor more than square annuli, so
                                        # the constant is sized to corpus
                                        # measurements rather than theory
    max_io_set: int = 192               # input/output set size per edge
    max_well_cover_cells: int = 224     # cells in one well-covering region;
                                        # a square-cell region of radius four
                                        # edge lengths holds well over 100
                                        # cells once finer neighbours are
                                        # dragged in
    max_well_cover_rings: int = 64      # growth passes before giving up
    max_refine_rounds: int = 40         # rebuild passes while separations fail
    max_tree_depth: int = 50            # quadtree levels; beyond this points
                                        # are indistinguishable at root scale
    max_marks_per_h: int = 100          # marked generators <= this * h
    max_arcs_per_n: int = 100           # traced bisector arcs <= this * n
    max_spm_prime_vertices_per_h: int = 100
    max_spm_size_per_n: int = 100
    max_route_components: int = 8       # distinct homotopy routes tracked per edge


@dataclass
class Config:
    """Numeric configuration for a map build."""

    eps_geo: float = 1e-9               # relative geometric tolerance
    perturb: bool = False               # deterministic jitter for degenerate scenes
    perturb_magnitude: float = 1e-7     # relative jitter size when enabled
    perturb_seed: int = 0
    # How endpoint wavelets participate in merges: "insert" keeps them as
    # extra circular wavelets, "eliminate" uses them only to prune losing
    # claims.  Both must agree on distances; a test asserts that.
    artificial_wavelet_mode: str = "insert"
    audits: AuditConstants = field(default_factory=AuditConstants)

    def scaled_eps(self, diameter: float) -> float:
        return self.eps_geo * max(diameter, 1.0)


DEFAULT_CONFIG = Config()
