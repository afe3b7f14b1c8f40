# Workflows package
