import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ....errors import FeClustError
from ..export import read_taxonomies, write_dot, write_graph_csv, write_taxonomies
from ..merging import merge_taxonomies
from ..models import DEFAULT_FEW_SHOT, LabelerConfig, LabelerMode, load_few_shot
from ..tagging import tag_clusters
from ...cluster.report import candidate_from_dict, read_dendrogram
from ...embed.cache import read_embeddings
from ...embed.providers import build_provider

logger = logging.getLogger(__name__)


def tag_selected_clusters(embeddings_path: str, dendrogram_path: str, selection_path: str, output_path: str,
                          labeler_mode: str = LabelerMode.STUB.value, model: Optional[str] = None,
                          api_base: Optional[str] = None, max_label_tokens: int = 6, temperature: float = 0.0,
                          few_shot_path: Optional[str] = None, min_subtree_size: int = 4,
                          embed_mode: str = "hashing", embed_dim: int = 256, seed: int = 0,
                          embed_model: Optional[str] = None, embed_endpoint: Optional[str] = None,
                          diagnostics_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Build and label one mini-taxonomy per selected cluster.

    Args:
        embeddings_path: Embeddings JSONL; its order is the dendrogram leaf order
        dendrogram_path: Dendrogram JSON
        selection_path: Selection report holding the chosen candidate
        output_path: Where the labeled taxonomies go
        labeler_mode: remote_llm or deterministic_stub
        model: Chat model for remote labeling
        api_base: Chat API base
        max_label_tokens: Word cap on generated labels
        temperature: Sampling temperature
        few_shot_path: Optional JSON few-shot examples
        min_subtree_size: Smallest internal node kept as its own subcategory
        embed_mode, embed_dim, seed, embed_model, embed_endpoint: Provider used for label embeddings
        diagnostics_path: Optional JSON file for labeler fallbacks

    Returns:
        Dict with status, taxonomy count and labeler fallbacks
    """
    try:
        surfaces, _ = read_embeddings(embeddings_path)
        dendrogram = read_dendrogram(dendrogram_path)
        chosen = candidate_from_dict(json.loads(Path(selection_path).read_text(encoding="utf-8"))["chosen"])
        labeler = LabelerConfig(
            mode=LabelerMode(labeler_mode),
            few_shot_examples=load_few_shot(few_shot_path) if few_shot_path else DEFAULT_FEW_SHOT,
            max_label_tokens=max_label_tokens,
            temperature=temperature,
            api_base=api_base,
            **({"model": model} if model else {}),
        )
        provider = build_provider(embed_mode, dim=embed_dim, seed=seed, model=embed_model, endpoint=embed_endpoint)
        taxonomies, diagnostics = tag_clusters(chosen, dendrogram, surfaces, labeler, provider, min_subtree_size)
        write_taxonomies(output_path, taxonomies)
        artifacts = [output_path]
        if diagnostics_path:
            Path(diagnostics_path).write_text(json.dumps(diagnostics, indent=2), encoding="utf-8")
            artifacts.append(diagnostics_path)
        return {
            "status": "success",
            "message": f"tagged {len(taxonomies)} clusters ({len(diagnostics)} labeler fallbacks)",
            "taxonomies": len(taxonomies),
            "diagnostics": diagnostics,
            "artifacts": artifacts,
        }
    except (FeClustError, OSError, KeyError, ValueError) as e:
        logger.error(f"Tagging failed: {e}")
        return {"status": "error", "message": f"Failed to tag clusters: {e}"}


def merge_tagged_taxonomies(input_path: str, output_path: str, sigma: float = 0.75) -> Dict[str, Any]:
    """
    Merge tagged taxonomies whose root labels are similar enough.

    Args:
        input_path: Labeled taxonomies JSON with root label embeddings
        output_path: Where the merged taxonomies go
        sigma: Similarity threshold in [0, 1]

    Returns:
        Dict with status and before/after counts
    """
    try:
        taxonomies = read_taxonomies(input_path)
        merged = merge_taxonomies(taxonomies, sigma)
        write_taxonomies(output_path, merged)
        return {
            "status": "success",
            "message": f"{len(taxonomies)} taxonomies merged into {len(merged)}",
            "before": len(taxonomies),
            "after": len(merged),
            "artifacts": [output_path],
        }
    except (FeClustError, OSError) as e:
        logger.error(f"Taxonomy merge failed: {e}")
        return {"status": "error", "message": f"Failed to merge taxonomies: {e}"}


def export_taxonomies(input_path: str, dot_dir: str, csv_dir: str) -> Dict[str, Any]:
    """
    Export taxonomies as DOT digraphs and node/edge CSV files.

    Args:
        input_path: Taxonomies JSON
        dot_dir: Directory for one .dot file per taxonomy
        csv_dir: Directory for nodes.csv and edges.csv

    Returns:
        Dict with status and written files
    """
    try:
        taxonomies = read_taxonomies(input_path)
        written = write_dot(dot_dir, taxonomies) + write_graph_csv(csv_dir, taxonomies)
        return {
            "status": "success",
            "message": f"exported {len(taxonomies)} taxonomies",
            "artifacts": [str(p) for p in written],
        }
    except (FeClustError, OSError) as e:
        logger.error(f"Export failed: {e}")
        return {"status": "error", "message": f"Failed to export taxonomies: {e}"}
