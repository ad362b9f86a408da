"""P* toolkit - compute and verify the adjoint Bergman projection on the unit disk."""
