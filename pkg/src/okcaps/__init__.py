"""Exact symplectic capacities and Newton-Okounkov bodies of rational surfaces."""
