"""Result sink adapters."""

from .file_adapter import FileResultSink
from .in_memory_adapter import InMemoryResultSink

__all__ = ['FileResultSink', 'InMemoryResultSink']
