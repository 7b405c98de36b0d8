"""Long j-tight paths and cycles in binomial random k-uniform hypergraphs."""
