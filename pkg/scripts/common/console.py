"""Console banners, status lines and logging setup for the runner scripts."""

import logging
import sys

_QUIET = False


def setup_logging(verbose=False):
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level)


def set_quiet(quiet):
    global _QUIET
    _QUIET = bool(quiet)


def banner(title, subtitle=None):
    if _QUIET:
        return
    print("=" * 80)
    print(title)
    if subtitle:
        print(subtitle)
    print("=" * 80)


def ok(message):
    if not _QUIET:
        print(f"✅ {message}")


def warn(message):
    if not _QUIET:
        print(f"⚠️  WARNING: {message}")


def fail(message):
    # errors are always shown, even with --quiet
    print(f"❌ ERROR: {message}", file=sys.stderr)


def detail(message):
    if not _QUIET:
        print(f"   {message}")
