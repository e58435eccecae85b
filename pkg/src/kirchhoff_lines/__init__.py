"""Random systems of weighted broken lines with conservative crossings.

The package samples systems of horizontal and vertical weighted lines
on a box, driven by Markovian split, turn, and annihilation rules that
keep the flow conserved at every node, and verifies the resulting
distribution theory statistically: exit laws, mean node counts, cross
sections, reversibility under rotation, and face limits.
"""

from .catalog import (
    ModelPreset,
    preset,
    preset_names,
    six_vertex_types,
    six_vertex_weights,
    table_families,
)
from .config import RunOptions, load_config, parse_measure, parse_scalar_function
from .drawing import (
    NODE_KINDS,
    Drawing,
    Node,
    Segment,
    balance_identities,
    boundary,
    census,
    classify_nodes,
    deserialize,
    kirchhoff_defects,
    rotate180,
    serialize,
)
from .errors import (
    ConfigError,
    ImpossibleEventError,
    KirchhoffLinesError,
    MalformedDrawingError,
    ParameterError,
    PotentialError,
    SimulationError,
    UnsupportedModelError,
)
from .faces import Face, FaceSet, build_faces, potentials, transect
from .measures import (
    IntensityMeasure,
    SystemParams,
    atomic_measure,
    bernoulli,
    convolution,
    dirac,
    exponential_measure,
    gamma_measure,
    gaussian,
    geometric,
    poisson_measure,
    tilted,
    uniform_measure,
    validate,
)
from .render import render_svg
from .simulate import simulate
from .stats import (
    ALPHA,
    CheckResult,
    ReplicaSummary,
    StatReport,
    cross_section_battery,
    exit_process_battery,
    expected_face_count,
    expected_face_limits,
    expected_node_counts,
    face_battery,
    mean_count_battery,
    render_report,
    reversibility_battery,
    run_ensemble,
    standard_battery,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "CheckResult",
    "ConfigError",
    "Drawing",
    "Face",
    "FaceSet",
    "ImpossibleEventError",
    "IntensityMeasure",
    "KirchhoffLinesError",
    "MalformedDrawingError",
    "ModelPreset",
    "NODE_KINDS",
    "Node",
    "ParameterError",
    "PotentialError",
    "ReplicaSummary",
    "RunOptions",
    "Segment",
    "SimulationError",
    "StatReport",
    "SystemParams",
    "UnsupportedModelError",
    "atomic_measure",
    "balance_identities",
    "bernoulli",
    "boundary",
    "build_faces",
    "census",
    "classify_nodes",
    "convolution",
    "cross_section_battery",
    "deserialize",
    "dirac",
    "exit_process_battery",
    "expected_face_count",
    "expected_face_limits",
    "expected_node_counts",
    "exponential_measure",
    "face_battery",
    "gamma_measure",
    "gaussian",
    "geometric",
    "kirchhoff_defects",
    "load_config",
    "mean_count_battery",
    "parse_measure",
    "parse_scalar_function",
    "poisson_measure",
    "potentials",
    "preset",
    "preset_names",
    "render_report",
    "render_svg",
    "reversibility_battery",
    "rotate180",
    "run_ensemble",
    "serialize",
    "simulate",
    "six_vertex_types",
    "six_vertex_weights",
    "standard_battery",
    "summarize",
    "table_families",
    "tilted",
    "transect",
    "uniform_measure",
    "validate",
]
