"""Exact adelic approximation engine for derived categories of small rings."""
