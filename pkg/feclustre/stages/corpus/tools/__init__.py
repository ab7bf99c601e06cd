# Corpus stage tools package
