"""Guided modes and counter-propagating photon-pair generation in dielectric rods."""
