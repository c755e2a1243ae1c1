from .catalog import (
    CATALOG,
    ObjectiveSpec,
    TransformData,
    catalog_entry,
    catalog_markdown,
    chunk_sizes,
    compute_weights,
    eval_basic,
    eval_composition,
    eval_hybrid,
    make_spec,
    transform_input,
)
from .data import (
    DataError,
    OrthogonalityWarning,
    generate_transform_data,
    load_transform_data,
    missing_files,
    write_transform_data,
)
from .kernels import KERNEL_HALFWIDTH, KERNEL_IDS, KERNEL_NAMES


def build_objective(function_id: int, D: int, seed: int = 0, data_dir=None) -> ObjectiveSpec:
    """Objective from files in ``data_dir`` or, without one, generated from ``seed``."""
    if data_dir is not None:
        td = load_transform_data(data_dir, function_id, D)
    else:
        td = generate_transform_data(seed, function_id, D)
    return make_spec(function_id, td)


__all__ = [
    "CATALOG",
    "DataError",
    "KERNEL_HALFWIDTH",
    "KERNEL_IDS",
    "KERNEL_NAMES",
    "ObjectiveSpec",
    "OrthogonalityWarning",
    "TransformData",
    "build_objective",
    "catalog_entry",
    "catalog_markdown",
    "chunk_sizes",
    "compute_weights",
    "eval_basic",
    "eval_composition",
    "eval_hybrid",
    "generate_transform_data",
    "load_transform_data",
    "make_spec",
    "missing_files",
    "transform_input",
    "write_transform_data",
]
