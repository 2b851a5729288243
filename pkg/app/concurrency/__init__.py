"""Locks shared by the embedding cache and the loaded-bundle store."""
