# Stage 2a: embeddings and affinity
