# Remote feature extractor services
