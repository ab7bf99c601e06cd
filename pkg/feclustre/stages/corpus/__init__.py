# Stage 1: reviews, feature post-processing, hybrid merging and sampling
