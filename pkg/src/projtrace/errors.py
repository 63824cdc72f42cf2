"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI when
it reports failures as JSON.
"""


class ProjTraceError(Exception):
    code = "error"

    def __init__(self, message="", **detail):
        super().__init__(message)
        self.detail = detail

    def to_json(self):
        out = {"error": self.code, "detail": str(self)}
        if self.detail:
            out["data"] = self.detail
        return out


class AxiomViolation(ProjTraceError):
    code = "axiom_violation"

    def __init__(self, axiom, witness):
        super().__init__(f"{axiom} fails at {witness}", axiom=axiom, witness=list(witness))
        self.axiom = axiom
        self.witness = tuple(witness)


class SizeCap(ProjTraceError):
    code = "size_cap"


class SearchCap(ProjTraceError):
    code = "search_cap"


class DimensionMismatch(ProjTraceError):
    code = "dimension_mismatch"


class RingMismatch(ProjTraceError):
    code = "ring_mismatch"


class PreconditionFailed(ProjTraceError):
    code = "precondition_failed"


class NotCommutative(PreconditionFailed):
    code = "not_commutative"


class DecompositionFailed(ProjTraceError):
    code = "decomposition_failed"


class NotIdempotentOnWindow(ProjTraceError):
    code = "not_idempotent_on_window"


class WindowTooSmall(ProjTraceError):
    code = "window_too_small"


class MissingCertificate(ProjTraceError):
    code = "missing_certificate"

    def __init__(self, k):
        super().__init__(f"no certificate Y_{k}", k=k)
        self.k = k


class NotFound(ProjTraceError):
    code = "not_found"


class MembershipFailed(ProjTraceError):
    code = "membership_failed"


class ChainDataInvalid(ProjTraceError):
    code = "chain_data_invalid"


class CertificateSolveFailed(ProjTraceError):
    code = "certificate_solve_failed"


class Undetermined(ProjTraceError):
    code = "undetermined"


class NotMember(ProjTraceError):
    code = "not_member"


class GoldenMismatch(ProjTraceError):
    code = "golden_mismatch"


class InputError(ProjTraceError):
    code = "input_error"
