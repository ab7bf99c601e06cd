"""Report documents; the JSON schema is generated from these models."""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class ReviewAlignment(BaseModel):
    review_id: str
    matches: List[Tuple[int, int]]
    predicted: int
    gold: int


class EvalReport(BaseModel):
    n_slack: int
    beta: float
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f_beta: float = Field(ge=0.0, le=1.0)
    matched: int
    predicted_total: int
    gold_total: int
    reviews: List[ReviewAlignment] = []


class CorrectnessRow(BaseModel):
    dataset: str
    extractor: str
    n_slack: int
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f_beta: float = Field(ge=0.0, le=1.0)


class CandidateRow(BaseModel):
    threshold: float
    k: int
    valid: bool
    silhouette: Optional[float] = None
    silhouette_std: Optional[float] = None
    davies_bouldin: Optional[float] = None
    composite: Optional[float] = None
    score: Optional[float] = None


class TaxonomyRow(BaseModel):
    taxonomy_id: str
    label: str
    depth: int = Field(ge=1)
    leaves: int = Field(ge=1)
    coherence: float = Field(ge=-1.0, le=1.0)


class TopCluster(BaseModel):
    taxonomy_id: str
    label: str
    coherence: float
    members: List[str]


class AppTopClusters(BaseModel):
    app_id: str
    clusters: List[TopCluster]


class Spread(BaseModel):
    mean: float
    min: float
    max: float


class QualityReport(BaseModel):
    n_features: int
    strategy: str
    chosen_threshold: float
    chosen_k: int
    chosen_silhouette: float
    chosen_silhouette_std: Optional[float] = None
    chosen_davies_bouldin: Optional[float] = None
    candidates: List[CandidateRow]
    taxonomy_count: int
    empty_taxonomies: int
    depth: Spread
    leaves: Spread
    mean_coherence: float
    taxonomies: List[TaxonomyRow]
    top_clusters: List[TopCluster]
    top_clusters_by_app: List[AppTopClusters] = []
    correctness: List[CorrectnessRow] = []
