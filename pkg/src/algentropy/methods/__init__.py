"""Entropy estimation from degree sequences: ratios, recurrence fits, generating functions, roots."""
