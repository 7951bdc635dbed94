"""Higher-rank graphs, their boundary path groupoids and Steinberg algebras."""
from importlib import resources

from .core import KGraph, Path, build_omega, load, omega_path, validate
from .boundary import BoundaryPath, OmegaGraph, parse_boundary
from .errors import KGraphError

__all__ = ["KGraph", "Path", "BoundaryPath", "OmegaGraph", "KGraphError",
           "build_omega", "load", "omega_path", "validate", "parse_boundary",
           "fixture"]


def fixture(name):
    """Load one of the bundled example graphs by file stem, e.g. ``fixture("tt2")``."""
    import json
    text = resources.files(__package__).joinpath("fixtures", f"{name}.json").read_text()
    spec = json.loads(text)
    if "omega" in spec:
        return OmegaGraph(spec["omega"])
    return load(text, name=name)
