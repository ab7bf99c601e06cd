# Embedding provider services
