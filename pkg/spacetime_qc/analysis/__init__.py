"""Shadow tomography and design verification."""
