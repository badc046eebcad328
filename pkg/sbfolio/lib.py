"""Standalone helper functions"""

import os
import errno
import datetime

import numpy


def listfiles(dirname, extension=""):
    """Prefer empty list to OSError on os.listdir

    Example:
        >>> listfiles("/definitely/does/not/exist")
        []

    """

    try:
        return sorted(
            fname for fname in os.listdir(dirname)
            if fname.endswith(extension) and
            not fname.startswith(("_", "."))
        )

    except OSError as e:
        # Only handle missing directories
        if e.errno == errno.ENOENT:  # No such file or directory
            return list()
        raise


def time():
    """Return file-system safe string of current date and time"""
    return datetime.datetime.now().strftime("%Y%m%dT%H%M%SZ")


def format_staging_dir(root, time, name):
    return os.path.join(root, ".stage", name, time)


def remove_empty_parents(path, root):
    """Remove empty directories above `path`, stopping at `root`"""
    root = os.path.abspath(root)
    parent = os.path.dirname(os.path.abspath(path))

    while parent.startswith(root + os.sep):
        try:
            os.rmdir(parent)
        except OSError:
            break
        parent = os.path.dirname(parent)


def is_power_of_two(value):
    """Return whether `value` is a positive power of two

    Example:
        >>> is_power_of_two(16)
        True
        >>> is_power_of_two(12)
        False
        >>> is_power_of_two(0)
        False

    """

    return value > 0 and (value & (value - 1)) == 0


def to_gray_code(index):
    """Return the Gray code of counter `index`

    Example:
        >>> [to_gray_code(i) for i in range(8)]
        [0, 1, 3, 2, 6, 7, 5, 4]

    """

    return (index >> 1) ^ index


def flipped_bit(index):
    """Return the bit that changes between Gray codes `index - 1` and `index`

    Example:
        >>> [flipped_bit(i) for i in range(1, 8)]
        [0, 1, 0, 2, 0, 1, 0]

    """

    assert index > 0, "Gray code step %d has no predecessor" % index
    return (to_gray_code(index) ^ to_gray_code(index - 1)).bit_length() - 1


def bit_table(n_bits):
    """Return all 2^n_bits configurations as a (2^n, n) array of 0/1

    Column 0 is the most significant bit, such that row `r`
    is the binary expansion of `r`.

    Example:
        >>> bit_table(2).tolist()
        [[0, 0], [0, 1], [1, 0], [1, 1]]

    """

    rows = numpy.arange(2 ** n_bits, dtype=numpy.int64)
    shifts = numpy.arange(n_bits - 1, -1, -1, dtype=numpy.int64)
    return ((rows[:, None] >> shifts[None, :]) & 1).astype(numpy.int8)


def write_frame(frame, path):
    """Write pandas `frame` to `path` as CSV with lossless floats"""
    frame.to_csv(path, index=False, float_format="%.17g",
                 lineterminator="\n")
    return path


def makedirs(path):
    try:
        os.makedirs(path)
    except OSError as e:
        if e.errno != errno.EEXIST:  # Already exists
            raise
    return path
