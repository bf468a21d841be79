"""Interactive text-to-image clarification agent over probabilistic belief graphs."""

from scenebelief.graph import (
    BeliefGraph,
    Distribution,
    EditOp,
    Entity,
    EntityStatus,
    GraphEdit,
    NodeKind,
    NodeRef,
    Option,
    Relation,
    apply_answer,
    apply_edit,
    diff,
    graphs_equivalent,
    new_graph,
    node_uncertainty,
    normalize,
    point_mass,
    to_prompt,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefGraph",
    "Distribution",
    "EditOp",
    "Entity",
    "EntityStatus",
    "GraphEdit",
    "NodeKind",
    "NodeRef",
    "Option",
    "Relation",
    "apply_answer",
    "apply_edit",
    "diff",
    "graphs_equivalent",
    "new_graph",
    "node_uncertainty",
    "normalize",
    "point_mass",
    "to_prompt",
    "validate",
    "__version__",
]
