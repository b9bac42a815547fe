"""The module contains miscellaneous helpers.
It's not considered part of the public qbdLib API.
"""
import numbers


integerTypes = (numbers.Integral,)
numberTypes = (numbers.Real,)

_MASK64 = (1 << 64) - 1


def isNumber(value):
    """
    Real numbers, excluding booleans.

    >>> isNumber(1.5), isNumber(3), isNumber(True), isNumber("1")
    (True, True, False, False)
    """
    return isinstance(value, numberTypes) and not isinstance(value, bool)


def isInteger(value):
    """
    >>> isInteger(3), isInteger(3.0), isInteger(False)
    (True, False, False)
    """
    return isinstance(value, integerTypes) and not isinstance(value, bool)


def splitMix64(value):
    """Mix a 64-bit integer into a well spread 64-bit integer.

    Replication seeds are derived as splitMix64(baseSeed + index).

    >>> splitMix64(0)
    16294208416658607535
    >>> splitMix64(1) != splitMix64(2)
    True
    """
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def formatNumber(value):
    """Render a table cell: 12 significant digits, blank for None.

    >>> formatNumber(1.0 / 3.0)
    '0.333333333333'
    >>> formatNumber(50)
    '50'
    >>> formatNumber(None)
    ''
    >>> formatNumber(True)
    'true'
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isInteger(value):
        return "%d" % value
    if isNumber(value):
        return "%.12g" % value
    return "%s" % value


if __name__ == "__main__":
    import doctest

    doctest.testmod()
