"""
Domains, structured meshes and collocation clouds
"""
from .domain import (
    BoundaryKind,
    DomainShape,
    DomainSpec,
    NodeTag,
    Segment,
    bi_unit_square,
    boundary_normal,
    collocation_normal,
    l_shape,
    unit_square,
)
from .mesh import TriMesh, build_structured_mesh, reorder_nodes
from .cloud import (
    NodeCloud,
    RandomCloudConfig,
    build_node_cloud,
    build_random_cloud,
    triangulate_cloud,
)

__all__ = [
    'BoundaryKind', 'DomainShape', 'DomainSpec', 'NodeTag', 'Segment',
    'bi_unit_square', 'boundary_normal', 'collocation_normal', 'l_shape', 'unit_square',
    'TriMesh', 'build_structured_mesh', 'reorder_nodes',
    'NodeCloud', 'RandomCloudConfig', 'build_node_cloud', 'build_random_cloud',
    'triangulate_cloud',
]
