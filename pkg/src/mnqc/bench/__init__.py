"""Benchmark circuits, routing on the two-node device, noisy execution and benchmark scans."""
