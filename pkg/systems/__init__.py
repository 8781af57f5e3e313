# System plugins: every SystemModel subclass with a `kind` is registered automatically
