# Test Module