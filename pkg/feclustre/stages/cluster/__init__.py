"""Average-linkage clustering, threshold sweep and internal quality metrics."""
