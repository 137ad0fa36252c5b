"""Exception hierarchy shared by the pipeline stages."""


class LongformError(Exception):
    """Base class for every error raised by this package."""


class InputError(LongformError, ValueError):
    """Malformed or unreadable input file / argument."""


# segmentation


class EmptyAudio(InputError):
    pass


class InfeasibleCut(LongformError):
    pass


class UnsortedInput(InputError):
    pass


# transcription


class MalformedManifest(InputError):
    def __init__(self, line_no: int, message: str = "malformed manifest line"):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class BackendError(LongformError):
    """Raised by a backend for a single batch."""


class NonZeroExit(BackendError):
    def __init__(self, code: int, stderr: str = ""):
        msg = f"command exited with status {code}"
        if stderr.strip():
            msg += f": {stderr.strip()}"
        super().__init__(msg)
        self.code = code


class LineCountMismatch(BackendError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} output lines, got {got}")
        self.expected = expected
        self.got = got


class BackendFailure(LongformError):
    """A batch failed; the whole transcription run is abandoned."""

    def __init__(self, chunk_index: int, message: str):
        super().__init__(f"chunk {chunk_index}: {message}")
        self.chunk_index = chunk_index
        self.message = message


class UnknownChunkIndex(InputError):
    pass


# alignment


class AlignmentError(LongformError):
    pass


class InfeasibleLength(AlignmentError):
    def __init__(self, frames: int, required: int):
        super().__init__(f"{frames} frames cannot hold a CTC path needing {required}")
        self.frames = frames
        self.required = required


# normalize


class MalformedRule(InputError):
    def __init__(self, line_no: int, message: str = "missing '=>'"):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# scoring


class DuplicateId(InputError):
    pass
