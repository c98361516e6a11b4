"""Exception hierarchy for the LTAG coordination engine."""


class LTAGError(Exception):
    """Base class for every error raised by this package."""


# grammar_core

class MalformedTree(LTAGError):
    pass


class FootCountError(LTAGError):
    pass


class NoAnchor(LTAGError):
    pass


class AnchorMismatch(LTAGError):
    pass


class NotInSecondProjection(LTAGError):
    pass


class AnchorContractionDisallowed(LTAGError):
    pass


class MultipleFootDominated(LTAGError):
    pass


# derivation engine

class SiteOccupied(LTAGError):
    pass


class CategoryMismatch(LTAGError):
    pass


class NotSubstitutionSite(LTAGError):
    pass


class NotAdjoinable(LTAGError):
    pass


class ContractionMismatch(LTAGError):
    pass


class LinkAlreadyFilled(LTAGError):
    pass


class IncompleteDerivation(LTAGError):
    pass


class CyclicDerivation(LTAGError):
    pass


class UnknownNode(LTAGError):
    pass


# grammar_io

class GrammarSyntaxError(LTAGError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class TemplateValidationError(LTAGError):
    def __init__(self, template, cause):
        super().__init__(f"template {template!r}: {cause}")
        self.template = template
        self.cause = cause


class UnknownTemplate(LTAGError):
    pass


class DuplicateEntry(LTAGError):
    pass


class SchemaViolation(LTAGError):
    pass


class DanglingReference(LTAGError):
    pass


# parser

class UnknownToken(LTAGError):
    pass
