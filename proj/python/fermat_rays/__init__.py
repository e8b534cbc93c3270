"""Python access to the lightlike connecting-ray solver.

The compiled extension ``_core`` normally sits next to this package (installed
builds).  During development the build tree holds it instead; set
``FERMAT_RAYS_EXT_DIR`` to that directory and the import falls through to it.
"""

from __future__ import annotations

import os
import sys

try:
    from ._core import (  # type: ignore[attr-defined]
        FermatError,
        arrival_time,
        catalog_names,
        run_scenario,
        run_scenario_file,
        scenario_hash,
        trace_ray,
    )
except ImportError:  # pragma: no cover - exercised in dev builds only
    _ext_dir = os.environ.get("FERMAT_RAYS_EXT_DIR")
    if not _ext_dir:
        raise
    if _ext_dir not in sys.path:
        sys.path.insert(0, _ext_dir)
    from _core import (  # type: ignore[import-not-found]
        FermatError,
        arrival_time,
        catalog_names,
        run_scenario,
        run_scenario_file,
        scenario_hash,
        trace_ray,
    )

__all__ = [
    "FermatError",
    "arrival_time",
    "catalog_names",
    "run_scenario",
    "run_scenario_file",
    "scenario_hash",
    "trace_ray",
]
