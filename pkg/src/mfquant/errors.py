"""Exception hierarchy shared across the pipeline.

ConfigError maps to CLI exit code 1, DataError (and subclasses) to exit
code 2. Programming errors (bad arguments to numerical kernels) raise
plain ValueError instead.
"""


class MFQuantError(Exception):
    """Base class for all mfquant errors."""


class ConfigError(MFQuantError):
    """Invalid configuration or unusable parameter combination."""


class DataError(MFQuantError):
    """Input data is missing, malformed, or unusable."""


class CorpusError(DataError):
    """Corpus files cannot be read or yield no usable records."""


class LexiconError(DataError):
    """The moral-foundation dictionary file is missing or malformed."""


class PipelineError(DataError):
    """A pipeline stage cannot run (missing prerequisite artifacts, lock held)."""
