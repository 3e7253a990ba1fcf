"""Worker-side helpers for running solver jobs outside the caller."""
