# Pipeline configuration package
