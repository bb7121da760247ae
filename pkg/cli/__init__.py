"""
SteinBounds CLI Package

Command-line front-end for the bounds library:
- RunSpec validation for the bounds, expand, kernel, factors and verify commands
- A closed vocabulary of test functions
- Kernel and Stein-factor grids ready for plotting
- JSON and 17-digit CSV emission
- The property suite used as the CI entry point
"""

from .runner import EXIT_INVALID, EXIT_OK, EXIT_PROPERTY_FAILURE, SteinBoundsRunner, render_csv, report_frame, run
from .spec import COMMANDS, GridReport, GridSpec, PropertyResult, RunSpec, VerifyReport, parse_function
from .verify import PROPERTIES, run_verify

__all__ = [
    'COMMANDS', 'RunSpec', 'GridSpec', 'GridReport', 'PropertyResult', 'VerifyReport', 'parse_function',
    'SteinBoundsRunner', 'run', 'render_csv', 'report_frame', 'EXIT_OK', 'EXIT_INVALID',
    'EXIT_PROPERTY_FAILURE', 'PROPERTIES', 'run_verify',
]
__version__ = '1.0.0'
