"""condfix: test-suite based repair of buggy if-conditions and missing
preconditions in MiniLang programs."""

__version__ = "0.1.0"
