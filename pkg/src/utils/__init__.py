"""Shared helpers: modality names, seeding and tensor conversion."""
