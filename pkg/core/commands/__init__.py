# Core commands package
