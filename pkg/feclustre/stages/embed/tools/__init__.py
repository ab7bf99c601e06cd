# Embed stage tools package
