"""Taxonomy persistence: JSON documents, DOT digraphs and node/edge CSV files."""
import csv
import json
import logging
from pathlib import Path
from typing import List, Sequence

import networkx as nx
import numpy as np
from networkx.drawing.nx_pydot import to_pydot

from ...errors import ConfigError
from .models import NodeKind, Taxonomy, TaxonomyNode

logger = logging.getLogger(__name__)


def node_to_dict(node: TaxonomyNode) -> dict:
    data = {"node_id": node.node_id, "label": node.label, "kind": node.kind.value}
    if node.kind == NodeKind.LEAF:
        data["feature"] = node.feature
    data["children"] = [node_to_dict(child) for child in node.children]
    return data


def node_from_dict(data: dict) -> TaxonomyNode:
    return TaxonomyNode(
        node_id=data["node_id"],
        label=data["label"],
        kind=NodeKind(data["kind"]),
        children=tuple(node_from_dict(child) for child in data.get("children", [])),
        feature=data.get("feature"),
    )


def taxonomy_to_dict(taxonomy: Taxonomy) -> dict:
    embedding = taxonomy.root_label_embedding
    return {
        "taxonomy_id": taxonomy.taxonomy_id,
        "provenance": list(taxonomy.provenance),
        "root_label_embedding": None if embedding is None else [float(x) for x in embedding],
        "root": node_to_dict(taxonomy.root),
    }


def taxonomy_from_dict(data: dict) -> Taxonomy:
    embedding = data.get("root_label_embedding")
    return Taxonomy(
        taxonomy_id=data["taxonomy_id"],
        root=node_from_dict(data["root"]),
        provenance=tuple(int(c) for c in data["provenance"]),
        root_label_embedding=None if embedding is None else np.asarray(embedding, dtype=np.float64),
    )


def write_taxonomies(path, taxonomies: Sequence[Taxonomy]) -> None:
    Path(path).write_text(json.dumps([taxonomy_to_dict(t) for t in taxonomies], indent=2, ensure_ascii=False),
                          encoding="utf-8")


def read_taxonomies(path) -> List[Taxonomy]:
    try:
        return [taxonomy_from_dict(item) for item in json.loads(Path(path).read_text(encoding="utf-8"))]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{path}: malformed taxonomy document ({e})") from e


def to_digraph(taxonomy: Taxonomy) -> nx.DiGraph:
    graph = nx.DiGraph(name=taxonomy.taxonomy_id)
    for parent, node in taxonomy.root.walk():
        shape = "oval" if node.kind == NodeKind.LEAF else "box"
        graph.add_node(node.node_id, label=json.dumps(node.label, ensure_ascii=False), shape=shape)
        if parent is not None:
            graph.add_edge(parent.node_id, node.node_id)
    return graph


def write_dot(directory, taxonomies: Sequence[Taxonomy]) -> List[Path]:
    """One DOT file per taxonomy, named after its id."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for taxonomy in taxonomies:
        path = directory / f"{taxonomy.taxonomy_id}.dot"
        path.write_text(to_pydot(to_digraph(taxonomy)).to_string(), encoding="utf-8")
        written.append(path)
    logger.info(f"Wrote {len(written)} DOT files to {directory}")
    return written


def write_graph_csv(directory, taxonomies: Sequence[Taxonomy]) -> List[Path]:
    """Bulk-load files: nodes.csv (node_id,label,kind,taxonomy_id) and edges.csv (parent_id,child_id)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes_path, edges_path = directory / "nodes.csv", directory / "edges.csv"
    with open(nodes_path, "w", newline="", encoding="utf-8") as nodes_file, \
            open(edges_path, "w", newline="", encoding="utf-8") as edges_file:
        nodes, edges = csv.writer(nodes_file), csv.writer(edges_file)
        nodes.writerow(["node_id", "label", "kind", "taxonomy_id"])
        edges.writerow(["parent_id", "child_id"])
        for taxonomy in taxonomies:
            for parent, node in taxonomy.root.walk():
                nodes.writerow([node.node_id, node.label, node.kind.value, taxonomy.taxonomy_id])
                if parent is not None:
                    edges.writerow([parent.node_id, node.node_id])
    return [nodes_path, edges_path]
