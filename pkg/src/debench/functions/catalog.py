"""The ten-function benchmark: catalog, objective specs and evaluation entry points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..core import ConfigurationError
from .evaluate import BASIC, COMPOSITION, HYBRID, Packed, composition_weights, evaluate_packed, shift_rotate
from .kernels import KERNEL_IDS, KERNEL_NAMES, KERNEL_SCALE, kernel_value

KINDS = {"unimodal": BASIC, "basic": BASIC, "hybrid": HYBRID, "composition": COMPOSITION}


@dataclass(frozen=True)
class CatalogEntry:
    function_id: int
    name: str
    kind: str
    components: tuple[str, ...]
    source: str
    proportions: tuple[float, ...] = ()
    sigma: tuple[float, ...] = ()
    lam: tuple[float, ...] = ()
    bias: tuple[float, ...] = ()

    @property
    def n_components(self) -> int:
        return len(self.components)


CATALOG: dict[int, CatalogEntry] = {
    e.function_id: e
    for e in (
        CatalogEntry(1, "Zakharov Function", "unimodal", ("zakharov",), "CEC'17 F03"),
        CatalogEntry(2, "Rosenbrock's Function", "basic", ("rosenbrock",), "CEC'17 F04"),
        CatalogEntry(3, "Rastrigin's Function", "basic", ("rastrigin",), "CEC'17 F05"),
        CatalogEntry(4, "Schwefel's Function", "basic", ("schwefel",), "CEC'17 F10"),
        CatalogEntry(
            5, "Hybrid Function 1", "hybrid",
            ("bent_cigar", "hgbat", "rastrigin"), "CEC'14 F18",
            proportions=(0.3, 0.3, 0.4),
        ),
        CatalogEntry(
            6, "Hybrid Function 2", "hybrid",
            ("expanded_schaffer_f6", "hgbat", "rosenbrock", "modified_schwefel"), "CEC'17 F16",
            proportions=(0.2, 0.2, 0.3, 0.3),
        ),
        CatalogEntry(
            7, "Hybrid Function 3", "hybrid",
            ("katsuura", "happycat", "expanded_griewank_rosenbrock", "modified_schwefel", "ackley"),
            "CEC'14 F22",
            proportions=(0.3, 0.2, 0.2, 0.1, 0.2),
        ),
        CatalogEntry(
            8, "Composition Function 1", "composition",
            ("rastrigin", "griewank", "modified_schwefel"), "CEC'17 F22",
            sigma=(10, 20, 30), lam=(1, 10, 1), bias=(0, 100, 200),
        ),
        CatalogEntry(
            9, "Composition Function 2", "composition",
            ("ackley", "high_conditioned_elliptic", "griewank", "rastrigin"), "CEC'17 F24",
            sigma=(10, 20, 30, 40), lam=(10, 1e-6, 10, 1), bias=(0, 100, 200, 300),
        ),
        CatalogEntry(
            10, "Composition Function 3", "composition",
            ("expanded_schaffer_f6", "modified_schwefel", "griewank", "rosenbrock", "rastrigin"),
            "CEC'17 F26",
            sigma=(10, 20, 20, 30, 40), lam=(0.005, 1, 10, 1, 10), bias=(0, 100, 200, 300, 400),
        ),
    )
}


def catalog_entry(function_id: int) -> CatalogEntry:
    try:
        return CATALOG[int(function_id)]
    except KeyError:
        raise ValueError(f"unknown function id {function_id}; expected 1-10") from None


def chunk_sizes(proportions: Sequence[float], D: int) -> list[int]:
    """Round ``p_i * D`` half-up; the last chunk takes whatever is left."""
    sizes = [int(math.floor(p * D + 0.5)) for p in proportions[:-1]]
    sizes.append(D - sum(sizes))
    if any(s < 1 for s in sizes):
        raise ConfigurationError(
            f"D={D} is too small for a {len(proportions)}-component hybrid (chunk sizes {sizes})"
        )
    return sizes


@dataclass(frozen=True)
class TransformData:
    """Shift vectors, rotation matrices and (for hybrids) a shuffle for one function."""

    shifts: np.ndarray  # (n, D)
    rotations: np.ndarray  # (n, D, D)
    permutation: Optional[np.ndarray] = None  # (D,) 0-based
    source: str = "generated"

    @property
    def D(self) -> int:
        return self.shifts.shape[1]

    def equals(self, other: "TransformData") -> bool:
        same_perm = (self.permutation is None and other.permutation is None) or (
            self.permutation is not None
            and other.permutation is not None
            and np.array_equal(self.permutation, other.permutation)
        )
        return (
            np.array_equal(self.shifts, other.shifts)
            and np.array_equal(self.rotations, other.rotations)
            and same_perm
        )


@dataclass(frozen=True)
class ObjectiveSpec:
    function_id: int
    kind: str
    components: tuple[str, ...]
    transforms: TransformData
    proportions: tuple[float, ...] = ()
    sigma: tuple[float, ...] = ()
    lam: tuple[float, ...] = ()
    bias: tuple[float, ...] = ()
    name: str = ""
    packed: Packed = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.components)
        t = self.transforms
        D = t.D
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown objective kind {self.kind!r}")
        code = KINDS[self.kind]
        kids = np.array([KERNEL_IDS[c] for c in self.components], dtype=np.int64)
        if code == HYBRID:
            if t.permutation is None:
                raise ConfigurationError("hybrid functions need a shuffle permutation")
            if not math.isclose(sum(self.proportions), 1.0, abs_tol=1e-12) or len(self.proportions) != n:
                raise ConfigurationError("hybrid proportions must match the components and sum to 1")
            sizes = chunk_sizes(self.proportions, D)
            bounds = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
            perm = np.asarray(t.permutation, dtype=np.int64)
        else:
            bounds = np.array([0, D], dtype=np.int64)
            perm = np.arange(D, dtype=np.int64)
        n_transforms = 1 if code != COMPOSITION else n
        if t.shifts.shape[0] < n_transforms or t.rotations.shape[0] < n_transforms:
            raise ConfigurationError(
                f"F{self.function_id:02d} needs {n_transforms} shift vectors and rotation matrices"
            )
        if code == COMPOSITION:
            if not (len(self.sigma) == len(self.lam) == len(self.bias) == n):
                raise ConfigurationError("composition parameters must have one entry per component")
            if any(b >= c for b, c in zip(self.bias, self.bias[1:])) or self.bias[0] != 0:
                raise ConfigurationError("composition bias must increase strictly from 0")
        packed = Packed(
            kind=code,
            kids=kids,
            scales=np.ascontiguousarray(KERNEL_SCALE[kids]),
            shifts=np.ascontiguousarray(t.shifts[:n_transforms], dtype=np.float64),
            rot_t=np.ascontiguousarray(np.transpose(t.rotations[:n_transforms], (0, 2, 1)), dtype=np.float64),
            perm=perm,
            bounds=bounds,
            lam=np.array(self.lam or [1.0] * n, dtype=np.float64),
            sigma=np.array(self.sigma or [1.0] * n, dtype=np.float64),
            bias=np.array(self.bias or [0.0] * n, dtype=np.float64),
        )
        object.__setattr__(self, "packed", packed)

    @property
    def D(self) -> int:
        return self.transforms.D

    @property
    def optimum(self) -> np.ndarray:
        """A global minimizer: the (first) shift vector."""
        return self.transforms.shifts[0].copy()

    def evaluate(self, X: np.ndarray, out: Optional[np.ndarray] = None, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """Evaluate each row of ``X`` (or rows ``start:stop`` into ``out``)."""
        return evaluate_packed(self.packed, X, out, start, stop)

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :])[0])


def make_spec(function_id: int, transforms: TransformData) -> ObjectiveSpec:
    e = catalog_entry(function_id)
    return ObjectiveSpec(
        function_id=e.function_id,
        kind=e.kind,
        components=e.components,
        transforms=transforms,
        proportions=e.proportions,
        sigma=e.sigma,
        lam=e.lam,
        bias=e.bias,
        name=e.name,
    )


def _kernel_id(kernel) -> int:
    if isinstance(kernel, str):
        if kernel not in KERNEL_IDS:
            raise ValueError(f"unknown kernel {kernel!r}")
        return KERNEL_IDS[kernel]
    kid = int(kernel)
    if not 0 <= kid < len(KERNEL_NAMES):
        raise ValueError(f"unknown kernel id {kernel}")
    return kid


def eval_basic(kernel, z) -> float:
    """Raw kernel value at an already transformed point."""
    return float(kernel_value(_kernel_id(kernel), np.ascontiguousarray(z, dtype=np.float64)))


def transform_input(x, spec: ObjectiveSpec, component: int = 0) -> np.ndarray:
    """Scaled, shifted and rotated input for one component.

    Hybrids are scaled per chunk after shuffling, so their outer transform
    uses a unit scale.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (spec.D,):
        raise ValueError(f"expected a vector of length {spec.D}, got shape {x.shape}")
    p = spec.packed
    scale = 1.0 if p.kind == HYBRID else float(p.scales[component])
    out = np.empty(spec.D)
    shift_rotate(x, p.shifts[component], p.rot_t[component], scale, out, np.empty(spec.D))
    return out


def eval_hybrid(spec: ObjectiveSpec, x) -> float:
    if spec.kind != "hybrid":
        raise ValueError(f"F{spec.function_id:02d} is not a hybrid function")
    return spec(x)


def compute_weights(x, spec: ObjectiveSpec) -> np.ndarray:
    if spec.kind != "composition":
        raise ValueError(f"F{spec.function_id:02d} is not a composition function")
    out = np.empty(len(spec.components))
    composition_weights(np.ascontiguousarray(x, dtype=np.float64), spec.packed.shifts, spec.packed.sigma, out)
    return out


def eval_composition(spec: ObjectiveSpec, x) -> float:
    if spec.kind != "composition":
        raise ValueError(f"F{spec.function_id:02d} is not a composition function")
    return spec(x)


def catalog_markdown() -> str:
    """Human-readable catalog: kernels, parameters and data-file names."""
    lines = [
        "| F | Name | Kind | Components | Parameters | Source | Data files (per D) |",
        "|---|------|------|------------|------------|--------|--------------------|",
    ]
    for fid, e in CATALOG.items():
        comps = ", ".join(f"{c} (x{KERNEL_SCALE[KERNEL_IDS[c]]:g})" for c in e.components)
        if e.kind == "hybrid":
            params = f"p={list(e.proportions)}"
        elif e.kind == "composition":
            params = f"sigma={list(e.sigma)} lambda={list(e.lam)} bias={list(e.bias)}"
        else:
            params = ""
        files = f"shift_data_{fid}_D<D>.txt, M_{fid}_D<D>.txt"
        if e.kind == "hybrid":
            files += f", shuffle_data_{fid}_D<D>.txt"
        lines.append(f"| F{fid:02d} | {e.name} | {e.kind} | {comps} | {params} | {e.source} | {files} |")
    return "\n".join(lines)
