"""Exception hierarchy shared across the pipeline."""


class FrameForgeError(Exception):
    """Base class for all pipeline errors."""


# --- template / spec parsing ---------------------------------------------

class MissingSection(FrameForgeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"template section missing: {name!r}")


class MalformedValue(FrameForgeError):
    def __init__(self, field: str, line: str):
        self.field = field
        self.line = line
        super().__init__(f"malformed value for {field!r}: {line!r}")


class InvariantViolation(FrameForgeError):
    def __init__(self, description: str):
        self.description = description
        super().__init__(description)


# --- planning -------------------------------------------------------------

class IndexOutOfRange(FrameForgeError):
    pass


class PlanningExhausted(FrameForgeError):
    """Checkpoint A still failing after the retry budget."""


# --- geometry ---------------------------------------------------------------

class SharedElevationMismatch(FrameForgeError):
    def __init__(self, bay: int, story: int):
        self.bay = bay
        self.story = story
        super().__init__(
            f"girder left end of bay {bay}, story {story} has no node on the "
            f"shared column line at that elevation"
        )


class UnmatchedEndpoint(FrameForgeError):
    def __init__(self, element_id: int, coord):
        self.element_id = element_id
        self.coord = coord
        super().__init__(f"element {element_id}: no node at {coord}")


class AmbiguousMatch(FrameForgeError):
    def __init__(self, element_id: int):
        self.element_id = element_id
        super().__init__(f"element {element_id}: more than one node within tolerance")


class GeometryExhausted(FrameForgeError):
    """Checkpoint B still failing after the regeneration budget."""


# --- loads ------------------------------------------------------------------

class UnresolvableSelector(FrameForgeError):
    def __init__(self, text: str):
        self.text = text
        super().__init__(f"selector not resolvable on the deterministic path: {text!r}")


class EmptySelection(FrameForgeError):
    def __init__(self, selector):
        self.selector = selector
        super().__init__(f"selector matched nothing: {selector}")


class DanglingReference(FrameForgeError):
    def __init__(self, kind: str, ref_id: int):
        self.kind = kind
        self.ref_id = ref_id
        super().__init__(f"load references missing {kind} {ref_id}")


# --- solver -----------------------------------------------------------------

class SingularSystem(FrameForgeError):
    """Mechanism or insufficient supports: the reduced stiffness is not SPD."""


class NumericalFailure(FrameForgeError):
    pass


# --- agents / transport ------------------------------------------------------

class RemoteTimeout(FrameForgeError):
    pass


class TransportError(FrameForgeError):
    pass


class AuthError(FrameForgeError):
    pass


class SchemaViolation(FrameForgeError):
    def __init__(self, role: str, detail: str = ""):
        self.role = role
        self.detail = detail
        super().__init__(f"role {role!r} output failed schema validation: {detail}")


class UnknownModel(FrameForgeError):
    def __init__(self, model_id: str):
        self.model_id = model_id
        super().__init__(f"no profile for model {model_id!r}")


# --- scoring ------------------------------------------------------------------

class TopologyMismatch(FrameForgeError):
    pass
