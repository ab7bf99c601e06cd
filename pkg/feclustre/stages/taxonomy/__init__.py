"""Mini-taxonomy construction, labeling, merging and scoring."""
