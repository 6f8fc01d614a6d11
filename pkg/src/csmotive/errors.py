"""Exception types shared across the toolkit.

Every domain error derives from CsMotiveError so the CLI can map any of
them to exit code 1.
"""

from __future__ import annotations


class CsMotiveError(Exception):
    """Base class for all toolkit domain errors."""


class MalformedLine(CsMotiveError):
    def __init__(self, line_no: int, message: str = "unbalanced bracket group"):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class EmptyTranscript(CsMotiveError):
    def __init__(self, transcript_id: str = ""):
        self.transcript_id = transcript_id
        super().__init__(f"no utterances survived parsing: {transcript_id!r}")


class InsufficientSeed(CsMotiveError):
    def __init__(self, lang: str, got: int, needed: int):
        self.lang = lang
        self.got = got
        self.needed = needed
        super().__init__(f"seed corpus for {lang} has {got} words, needs >= {needed}")


class EmptyStore(CsMotiveError):
    def __init__(self, message: str = "annotation store has no records"):
        super().__init__(message)


class MissingRecord(CsMotiveError):
    def __init__(self, instance_id: str, annotator_id: str):
        self.instance_id = instance_id
        self.annotator_id = annotator_id
        super().__init__(f"no record for instance {instance_id!r} by annotator {annotator_id!r}")


class SchemaVersionMismatch(CsMotiveError):
    def __init__(self, expected: str, got: str):
        self.expected = expected
        self.got = got
        super().__init__(f"label schema version mismatch: expected {expected!r}, got {got!r}")


class SingleClassTrainingSet(CsMotiveError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"training set for label {label!r} contains a single class")


class BackendUnavailable(CsMotiveError):
    def __init__(self, endpoint: str, cause: str = ""):
        self.endpoint = endpoint
        super().__init__(f"backend {endpoint} unreachable" + (f": {cause}" if cause else ""))


class BackendProtocolError(CsMotiveError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(f"backend protocol error: {detail}")


class TranslationFailed(CsMotiveError):
    def __init__(self, span_text: str, cause: str):
        self.span_text = span_text
        self.cause = cause
        super().__init__(f"translation failed for {span_text!r}: {cause}")


class UnknownConversation(CsMotiveError):
    def __init__(self, conversation_id: str):
        self.conversation_id = conversation_id
        super().__init__(f"unknown conversation id {conversation_id!r}")


class IdMismatch(CsMotiveError):
    def __init__(self, message: str):
        super().__init__(message)


class ConfigError(CsMotiveError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid project config:\n" + "\n".join(f"  - {p}" for p in problems))
