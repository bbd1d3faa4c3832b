"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class KnapcountError(Exception):
    exit_code = 1


class InputError(KnapcountError, ValueError):
    """Malformed instance, parameter out of range, or mismatched shapes."""

    exit_code = 2


class CapacityError(KnapcountError):
    """A table or state space would exceed the configured memory budget."""

    exit_code = 3


class SamplingError(KnapcountError):
    """Every retry for one draw was rejected; nothing was emitted for it."""

    exit_code = 4

    def __init__(self, draw_index, attempts):
        super().__init__(f"draw {draw_index}: all {attempts} attempts rejected")
        self.draw_index = draw_index
        self.attempts = attempts


class OracleContractError(KnapcountError):
    """An implicit state-space oracle broke its ordering/midpoint contract."""
