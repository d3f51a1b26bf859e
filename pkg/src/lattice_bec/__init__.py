"""BEC in a 1D optical lattice: spectral, semi-classical and reduced nonlinear models."""
