"""Long-running acceptance tests for Pachner Walk."""
