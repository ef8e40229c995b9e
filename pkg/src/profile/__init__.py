"""Radial profile f0, hypothesis checks and derived scalar fields."""

from src.profile.profile import Profile, ProfileConstants, ValidationReport, load_profile

__all__ = ["Profile", "ProfileConstants", "ValidationReport", "load_profile"]
