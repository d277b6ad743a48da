"""Exception types shared across the package.

Every domain error derives from :class:`G2Error` so the CLI can map it to exit
status 1 with a structured JSON body.
"""


class G2Error(Exception):
    """Base class for domain errors."""

    code = "domain-error"

    def to_json(self):
        return {"error": self.code, "message": str(self)}


class AmbiguousClass(G2Error):
    code = "ambiguous-class"


class UnsupportedEpsilon(G2Error):
    code = "unsupported-epsilon"


class InvalidDescriptor(G2Error):
    code = "invalid-descriptor"


class NotASink(G2Error):
    code = "not-a-sink"


class MissingHomotopyData(G2Error):
    code = "missing-homotopy-data"


class NonTriangularRegion(G2Error):
    code = "non-triangular-region"


class PreconditionViolated(G2Error):
    code = "precondition-violated"


class StuckDescriptor(G2Error):
    code = "stuck-descriptor"


class NoConvergence(G2Error):
    code = "no-convergence"


class NoSeparatrixLands(G2Error):
    code = "no-separatrix-lands"
