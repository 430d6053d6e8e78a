"""GeoJSON export of instances and deployments (RFC 7946, WGS84 lon-lat).

Demand nodes become Point features carrying per-type demand and covered
flags; open bases become Point features listing the team types placed.
Closed candidate sites are omitted. Features are ordered deterministically
by id (demands first, then bases).
"""

from __future__ import annotations

from typing import Any

from .coverage import CoverMatrix, build_cover_matrix, evaluate_deployment
from .errors import ValidationError
from .instance import Deployment, Instance
from .pareto import ParetoPoint


def _point(coords) -> dict[str, Any]:
    lat, lon = coords
    return {"type": "Point", "coordinates": [float(lon), float(lat)]}


def export_geojson(instance: Instance, deployment: Deployment | ParetoPoint,
                   cover: CoverMatrix | None = None) -> dict[str, Any]:
    """FeatureCollection for a deployment (or a sweep point's deployment).
    Every referenced entity (all demand nodes, every open base) must carry
    coordinates."""
    if isinstance(deployment, ParetoPoint):
        deployment = deployment.deployment
    cover = cover or build_cover_matrix(instance)
    report = evaluate_deployment(instance, cover, deployment)

    for node in sorted(instance.demands, key=lambda d: d.id):
        if node.coordinates is None:
            raise ValidationError(f"demand node {node.id} has no coordinates")
    open_sorted = sorted(deployment.open_bases)
    for site_id in open_sorted:
        if instance.sites[instance.site_index[site_id]].coordinates is None:
            raise ValidationError(f"site {site_id} has no coordinates")

    features: list[dict[str, Any]] = []
    for node in sorted(instance.demands, key=lambda d: d.id):
        properties: dict[str, Any] = {"id": node.id, "kind": "demand"}
        for type_id in instance.type_ids:
            properties[f"demand_{type_id}"] = int(node.demand_per_type.get(type_id, 0))
            properties[f"covered_{type_id}"] = report.cover_flags[(node.id, type_id)]
        features.append({"type": "Feature", "geometry": _point(node.coordinates),
                         "properties": properties})

    placed_types: dict[str, list[str]] = {}
    for site_id, type_id in deployment.placements:
        placed_types.setdefault(site_id, []).append(type_id)
    for site_id in open_sorted:
        site = instance.sites[instance.site_index[site_id]]
        features.append({
            "type": "Feature",
            "geometry": _point(site.coordinates),
            "properties": {
                "id": site_id,
                "kind": "base",
                "team_types": sorted(placed_types.get(site_id, [])),
            },
        })
    return {"type": "FeatureCollection", "features": features}
