# Runtime package
