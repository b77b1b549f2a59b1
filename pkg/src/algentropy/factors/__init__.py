"""Factor tracking, stabilization, derived recurrences and Laurent tests."""
