"""Retrieval-augmented prompting and answer verification for elementary
math benchmarks: similar-problem + background-knowledge retrieval, few-shot
prompt assembly, multi-path generation, and program-checked answer
selection."""

__version__ = "0.1.0"
