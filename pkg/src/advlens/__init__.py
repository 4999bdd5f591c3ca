"""advlens: adverse-condition augmentation, classical enhancement, and the
evaluation harness measuring how enhancement changes model accuracy.

Submodules are imported explicitly (``from advlens import augment``); the
package root stays import-light because backend child processes load it.
"""

__version__ = "0.1.0"
