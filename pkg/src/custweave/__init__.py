"""custweave: metagraph-based customization modelling for multi-tenant apps."""

from .engine import (
    Decision,
    OracleReport,
    ReplayResult,
    Session,
    add_component,
    apply_operation,
    delete_component,
    oracle_valid,
    replay,
    tenant_column,
    tenant_metagraph,
    tenant_row,
)
from .metagraph import (
    Edge,
    Metagraph,
    PathCheck,
    Triple,
    TripleMatrix,
    adjacency_column,
    adjacency_row,
    build_adjacency,
    closure,
    coinput,
    cooutput,
    edge,
    is_independent,
    is_input_independent,
    is_metapath,
    is_output_independent,
    is_simple_path,
    is_submetagraph,
    new_metagraph,
    sum_adjacency,
)
from .model import (
    MODE_AND,
    MODE_OR,
    AppModel,
    Component,
    Concern,
    ConcernSelection,
    CustomizationPoint,
    Dimension,
    GuidanceEntry,
    RequirementEdge,
    TenantCustomization,
    Violation,
    WellFormednessReport,
    app_metagraph,
    concern_guidance,
    concern_metagraph,
    derive_none_concerns,
    dimension_adjacency,
    new_customization,
    requirement,
    validate_model,
)
from .model_io import (
    GeneratorParams,
    canonical_json,
    generate_model,
    load_customization,
    load_model,
    matrix_records,
    save_customization,
    save_model,
)

__version__ = "0.1.0"
