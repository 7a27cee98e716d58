from __future__ import annotations


class ExtractError(Exception):
    """Base class for extraction failures."""


class UnknownModel(ExtractError):
    def __init__(self, model_id: str, known: list[str]):
        self.model_id = model_id
        super().__init__(f"unknown model {model_id!r}; registered: {', '.join(known)}")


class CheckpointUnavailable(ExtractError):
    pass


class UndecodableImage(ExtractError):
    def __init__(self, path: str, reason: str = ""):
        self.path = path
        super().__init__(f"cannot decode image {path}" + (f": {reason}" if reason else ""))
