"""Exception hierarchy shared by every module of the package."""


class ZetaCosmoError(Exception):
    """Base class; the CLI maps any subclass to a nonzero exit status."""


class ConfigError(ZetaCosmoError, ValueError):
    pass


class IoError(ZetaCosmoError, OSError):
    pass


class AccuracyNotAttainable(ZetaCosmoError):
    pass


class MissedZeros(ZetaCosmoError):
    def __init__(self, interval, found=None, expected=None):
        self.interval = tuple(interval)
        self.found = found
        self.expected = expected
        msg = f"zero count mismatch on ({interval[0]!r}, {interval[1]!r}]"
        if found is not None:
            msg += f": found {found}, expected {expected}"
        super().__init__(msg)


class ParseError(ZetaCosmoError, ValueError):
    def __init__(self, line, detail=""):
        self.line = line
        super().__init__(f"line {line}: {detail or 'malformed ordinate'}")


class OrderViolation(ZetaCosmoError, ValueError):
    def __init__(self, line):
        self.line = line
        super().__init__(f"line {line}: ordinate not strictly increasing")


class SanityError(ZetaCosmoError, ValueError):
    pass


class TooCloseToZero(ZetaCosmoError, ValueError):
    def __init__(self, t, gamma, distance):
        self.t, self.gamma, self.distance = t, gamma, distance
        super().__init__(f"t={t!r} lies {distance:.3g} from ordinate {gamma!r}")


class InsufficientTable(ZetaCosmoError):
    def __init__(self, needed, h_max):
        self.needed, self.h_max = needed, h_max
        super().__init__(f"zero table covers up to {h_max!r}, need {needed!r}")


class AtZeroOfZ(ZetaCosmoError, ValueError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"Z vanishes at t={t!r}; the model radius is zero")


class NotPositiveAtCenter(ZetaCosmoError):
    def __init__(self, t0, p):
        self.t0, self.p = t0, p
        super().__init__(f"pressure at t0={t0!r} is {p!r} <= 0")
