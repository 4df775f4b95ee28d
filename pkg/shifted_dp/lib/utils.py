import datetime
import sys


def eprint(*args, **kwargs):
    """
    Prints to stderr.
    """
    print(*args, file=sys.stderr, **kwargs)


def log(msg, file=None):
    """
    Prints msg prefixed with the current time.
    """
    print('{}: {}'.format(datetime.datetime.now(), msg), file=file)


def format_float(value):
    """
    Text that reads back to the same double (17 significant digits).

    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(-3.5)
    '-3.5'

    """
    return '{:.17g}'.format(value)
